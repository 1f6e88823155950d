#include "twochoice/snapshot.hpp"

#include <stdexcept>

namespace twochoice {

std::string to_hex(std::string_view bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out.push_back(digits[c >> 4]);
    out.push_back(digits[c & 0xf]);
  }
  return out;
}

std::string from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("invalid hex digit");
  };
  std::string out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<char>((nibble(hex[i]) << 4) | nibble(hex[i + 1])));
  }
  return out;
}

nlohmann::json snapshot_json(const BucketTable& table) {
  nlohmann::json records = nlohmann::json::array();
  for (std::size_t b = 0; b < table.bucket_count(); ++b) {
    for (const ItemRecord& record : table.bucket(b)) {
      records.push_back({{"key", to_hex(record.key)},
                         {"value", to_hex(record.value)},
                         {"b1", record.pair.first},
                         {"b2", record.pair.second},
                         {"bucket", b}});
    }
  }
  return {{"n", table.bucket_count()},
          {"capacity", table.capacity()},
          {"seeds", {table.seeds().first, table.seeds().second}},
          {"records", std::move(records)}};
}

BucketTable table_from_snapshot(const nlohmann::json& snapshot, PairHasher hasher) {
  TableConfig config;
  config.buckets = snapshot.at("n").get<std::size_t>();
  config.capacity = snapshot.at("capacity").get<std::size_t>();
  config.seeds.first = snapshot.at("seeds").at(0).get<std::uint64_t>();
  config.seeds.second = snapshot.at("seeds").at(1).get<std::uint64_t>();
  BucketTable table(config, std::move(hasher));
  for (const auto& entry : snapshot.at("records")) {
    ItemRecord record{from_hex(entry.at("key").get<std::string>()),
                      from_hex(entry.at("value").get<std::string>()),
                      BucketPair{entry.at("b1").get<std::size_t>(),
                                 entry.at("b2").get<std::size_t>()}};
    table.place_exact(entry.at("bucket").get<std::size_t>(), std::move(record));
  }
  return table;
}

}  // namespace twochoice
