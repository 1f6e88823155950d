#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "twochoice/bucket_table.hpp"

namespace twochoice::testing {

// Where every key currently lives.
inline std::map<std::string, std::size_t> locations(const BucketTable& table) {
  std::map<std::string, std::size_t> where;
  for (std::size_t b = 0; b < table.bucket_count(); ++b) {
    for (const ItemRecord& r : table.bucket(b)) where[r.key] = b;
  }
  return where;
}

// Number of keys present in both maps whose bucket differs.
inline std::size_t relocated(const std::map<std::string, std::size_t>& before,
                             const std::map<std::string, std::size_t>& after) {
  std::size_t changed = 0;
  for (const auto& [key, bucket] : before) {
    auto it = after.find(key);
    if (it != after.end() && it->second != bucket) ++changed;
  }
  return changed;
}

struct Placement {
  std::size_t bucket;
  BucketPair pair;
};

// Table with a scripted hasher and records placed exactly as listed.
inline BucketTable scripted_table(std::size_t n, std::size_t capacity,
                                  const std::vector<Placement>& placements) {
  BucketTable table(TableConfig{n, capacity, {}}, scripted_hasher());
  std::uint64_t id = 1000;
  for (const Placement& p : placements) {
    table.place_exact(p.bucket, ItemRecord{scripted_key(id++, p.pair), "v", p.pair});
  }
  return table;
}

}  // namespace twochoice::testing
