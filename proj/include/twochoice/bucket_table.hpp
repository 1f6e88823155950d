#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "twochoice/hash.hpp"
#include "twochoice/insert_policy.hpp"

namespace twochoice {

// Overrides the seeded hash family, e.g. to script collisions in tests.
using PairHasher = std::function<BucketPair(std::string_view key, std::size_t buckets)>;

struct ItemRecord {
  std::string key;
  std::string value;
  BucketPair pair;

  friend bool operator==(const ItemRecord&, const ItemRecord&) = default;
};

enum class InsertOutcome { placed, table_full_failure, duplicate_key_updated };

const char* to_string(InsertOutcome outcome);

struct InsertReceipt {
  InsertOutcome outcome = InsertOutcome::placed;
  std::size_t moves = 0;
  std::size_t depth = 0;
  std::size_t nodes_explored = 0;
  std::size_t cycle_edges_seen = 0;
  bool stuck = false;
};

// Hop i moves the record at `slot` of `bucket` to that record's alternate
// bucket, which is hops[i + 1].bucket, or `terminal` for the last hop.
struct PathHop {
  std::size_t bucket = 0;
  std::size_t slot = 0;

  friend bool operator==(const PathHop&, const PathHop&) = default;
};

struct EvictionPath {
  std::vector<PathHop> hops;
  std::size_t terminal = 0;

  std::size_t start() const { return hops.empty() ? terminal : hops.front().bucket; }
  std::size_t length() const { return hops.size(); }
};

struct SearchStats {
  std::size_t nodes_explored = 0;
  std::size_t depth = 0;  // deepest level visited
  std::size_t cycle_edges_seen = 0;
  bool stuck = false;  // search space closed with no usable bucket
};

struct SearchResult {
  std::optional<EvictionPath> path;
  SearchStats stats;
};

// Counts bucket reads performed by lookup().
struct LookupStats {
  std::size_t bucket_reads = 0;
};

class StalePathError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct TableConfig {
  std::size_t buckets = 1;
  std::size_t capacity = 2;
  HashSeeds seeds{};
};

// Two-choice hash table with capacity-B buckets. Every record lives in one of
// its two hashed buckets; inserts relocate records along eviction paths.
//
// Single writer: mutation requires exclusive access; const members may run
// concurrently with each other.
class BucketTable {
 public:
  explicit BucketTable(TableConfig config, PairHasher hasher = {});

  std::size_t bucket_count() const noexcept { return buckets_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return count_; }
  const HashSeeds& seeds() const noexcept { return seeds_; }
  bool has_custom_hasher() const noexcept { return static_cast<bool>(hasher_); }

  BucketPair pair_for(std::string_view key) const;

  // Reads both candidate buckets (one if they coincide).
  std::optional<std::string> lookup(std::string_view key, LookupStats* stats = nullptr) const;
  bool contains(std::string_view key) const { return lookup(key).has_value(); }

  InsertReceipt insert(std::string key, std::string value, const InsertPolicy& policy);
  bool remove(std::string_view key);

  std::span<const ItemRecord> bucket(std::size_t index) const { return buckets_.at(index); }
  std::size_t load(std::size_t index) const { return buckets_.at(index).size(); }
  std::size_t max_load() const;
  std::map<std::size_t, std::size_t> load_histogram() const;

  // Breadth-first backward search from both starts for the first bucket with
  // load < capacity. Successors of a bucket are the alternates of its records.
  SearchResult find_eviction_path_bfs(std::size_t start1, std::size_t start2,
                                      std::size_t max_depth, std::size_t max_nodes) const;

  // Same exploration, but visits everything within `depth` levels and returns
  // the path to the least-loaded bucket seen (first discovered on ties). The
  // path is absent only when that bucket is full.
  SearchResult find_min_load_path(std::size_t start1, std::size_t start2,
                                  std::size_t depth, std::size_t max_nodes) const;

  // Executes the path's moves from the terminal end backward, leaving one free
  // slot in path.start(). Returns the number of moves.
  std::size_t apply_move_path(const EvictionPath& path);

  // Full scan; throws InvariantViolation describing the first broken invariant.
  void check_invariants() const;

  // Rebuilds under new seeds with unbounded BFS inserts. On failure the table
  // is left untouched and false is returned. Never called implicitly.
  bool rehash(const HashSeeds& new_seeds);

  // Direct placement used when restoring snapshots: no search, no moves.
  // Throws std::invalid_argument if the record cannot live in `bucket`.
  void place_exact(std::size_t bucket, ItemRecord record);

  friend bool operator==(const BucketTable& a, const BucketTable& b) {
    return a.capacity_ == b.capacity_ && a.seeds_ == b.seeds_ && a.buckets_ == b.buckets_;
  }

 private:
  enum class SearchMode { first_free, min_load };

  SearchResult backward_search(std::size_t start1, std::size_t start2, std::size_t max_depth,
                               std::size_t max_nodes, SearchMode mode) const;
  std::optional<std::size_t> find_slot(std::size_t bucket, std::string_view key) const;
  InsertReceipt place_via_search(ItemRecord record, const SearchResult& search);
  InsertReceipt insert_random_walk(ItemRecord record, std::size_t max_steps);

  std::size_t capacity_;
  HashSeeds seeds_;
  PairHasher hasher_;
  std::vector<std::vector<ItemRecord>> buckets_;
  std::size_t count_ = 0;
  std::mt19937_64 walk_rng_;
};

// Hasher that reads the pair straight from keys produced by scripted_key().
PairHasher scripted_hasher();
std::string scripted_key(std::uint64_t id, BucketPair pair);

}  // namespace twochoice
