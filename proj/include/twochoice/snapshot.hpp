#pragma once

#include <string>
#include <string_view>

#include "twochoice/bucket_table.hpp"
#include "json.hpp"

namespace twochoice {

std::string to_hex(std::string_view bytes);
// Throws std::invalid_argument on odd length or non-hex characters.
std::string from_hex(std::string_view hex);

// {"n", "capacity", "seeds": [s1, s2], "records": [{key, value, b1, b2, bucket}]}
// with records in bucket order, then slot order.
nlohmann::json snapshot_json(const BucketTable& table);

// Rebuilds a table from a snapshot. `hasher` must match the one the snapshot
// was taken with; every record is checked against it.
BucketTable table_from_snapshot(const nlohmann::json& snapshot, PairHasher hasher = {});

}  // namespace twochoice
