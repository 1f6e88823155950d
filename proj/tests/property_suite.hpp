#pragma once

// Randomized model check shared by the unit suite and the acceptance binary.
// Every operation is mirrored on a std::map; any divergence is a violation.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "twochoice/bucket_table.hpp"
#include "twochoice/graph_oracle.hpp"
#include "twochoice/harness.hpp"
#include "twochoice/snapshot.hpp"

namespace twochoice::testing {

struct PropertyStats {
  std::size_t operations = 0;
  std::size_t inserts = 0;
  std::size_t removes = 0;
  std::size_t lookups = 0;
  std::size_t failed_inserts = 0;
  std::size_t oracle_instances = 0;
  std::size_t peel_checks = 0;
  std::size_t witness_checks = 0;
  std::size_t search_pairs = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

class PropertyRunner {
 public:
  explicit PropertyRunner(std::uint64_t seed) : rng_(seed) {}

  PropertyStats run(std::size_t min_operations) {
    while (stats_.operations < min_operations && stats_.violations.size() < 20) {
      table_round();
      graph_round();
    }
    return stats_;
  }

 private:
  std::size_t pick(std::size_t bound) { return static_cast<std::size_t>(rng_() % bound); }

  void fail(const std::string& what) {
    if (stats_.violations.size() < 20) stats_.violations.push_back(what);
  }

  InsertPolicy random_policy(std::size_t n) {
    switch (pick(5)) {
      case 0: return BfsPolicy::unbounded();
      case 1: return BfsPolicy::defaults_for(n);
      case 2: return DepthLimitedPolicy{pick(4), 1 + pick(64)};
      case 3: return RandomWalkPolicy{pick(40)};
      default: return GreedyPolicy{};
    }
  }

  static std::map<std::string, std::size_t> where(const BucketTable& table) {
    std::map<std::string, std::size_t> out;
    for (std::size_t b = 0; b < table.bucket_count(); ++b) {
      for (const ItemRecord& r : table.bucket(b)) out[r.key] = b;
    }
    return out;
  }

  void check_structure(const BucketTable& table, const std::map<std::string, std::string>& model) {
    try {
      table.check_invariants();
    } catch (const std::exception& e) {
      fail(std::string("invariant: ") + e.what());
    }
    if (table.size() != model.size()) fail("size differs from model");
    std::size_t stored = 0;
    for (std::size_t b = 0; b < table.bucket_count(); ++b) {
      if (table.load(b) > table.capacity()) fail("bucket over capacity");
      for (const ItemRecord& r : table.bucket(b)) {
        ++stored;
        if (r.pair != table.pair_for(r.key)) fail("stale pair on " + r.key);
        if (b != r.pair.first && b != r.pair.second) fail("record outside its candidates");
        const auto it = model.find(r.key);
        if (it == model.end() || it->second != r.value) fail("record not in model: " + r.key);
      }
    }
    if (stored != model.size()) fail("stored count differs from model");
  }

  void table_round() {
    const std::size_t n = 1 + pick(48);
    const std::size_t capacity = 1 + pick(3);
    BucketTable table(TableConfig{n, capacity, derive_seeds(rng_())});
    std::map<std::string, std::string> model;
    const std::size_t key_space = 1 + pick(capacity * n * 2 + 4);
    const std::size_t ops = 50 + pick(250);

    for (std::size_t op = 0; op < ops; ++op) {
      ++stats_.operations;
      const std::string key = "k" + std::to_string(pick(key_space));
      const std::size_t kind = pick(10);
      if (kind < 6) {
        ++stats_.inserts;
        const std::string value = std::to_string(op);
        const InsertPolicy policy = random_policy(n);
        const auto before = where(table);
        const std::string snapshot = snapshot_json(table).dump();
        const InsertReceipt receipt = table.insert(key, value, policy);
        const auto after = where(table);
        std::size_t changed = 0;
        for (const auto& [k, b] : before) changed += after.count(k) && after.at(k) != b;
        switch (receipt.outcome) {
          case InsertOutcome::placed:
            if (model.count(key)) fail("placed a duplicate");
            model[key] = value;
            if (changed != receipt.moves) fail("receipt moves differ from snapshot diff");
            break;
          case InsertOutcome::duplicate_key_updated:
            if (!model.count(key)) fail("update of an absent key");
            model[key] = value;
            if (changed != 0 || receipt.moves != 0) fail("update moved records");
            break;
          case InsertOutcome::table_full_failure:
            ++stats_.failed_inserts;
            if (model.count(key)) fail("failure on a present key");
            if (snapshot_json(table).dump() != snapshot) fail("failed insert changed the table");
            if (std::holds_alternative<BfsPolicy>(policy) &&
                std::get<BfsPolicy>(policy) == BfsPolicy::unbounded() && !receipt.stuck) {
              fail("unbounded BFS failed without being stuck");
            }
            break;
        }
      } else if (kind < 8) {
        ++stats_.removes;
        const bool removed = table.remove(key);
        if (removed != (model.erase(key) == 1)) fail("remove disagrees with model");
      } else {
        ++stats_.lookups;
        LookupStats reads;
        const auto found = table.lookup(key, &reads);
        const BucketPair pair = table.pair_for(key);
        const std::size_t expected_reads = pair.is_self_loop() ? 1 : 2;
        if (reads.bucket_reads != expected_reads) fail("lookup read count");
        const auto it = model.find(key);
        if (found.has_value() != (it != model.end()) || (found && *found != it->second)) {
          fail("lookup disagrees with model");
        }
      }
      if (op % 16 == 0) check_structure(table, model);
    }
    check_structure(table, model);
    search_power(table);
  }

  // A deeper min-load search sees a superset of buckets, so its choice is never worse.
  void search_power(const BucketTable& table) {
    const std::size_t n = table.bucket_count();
    for (int i = 0; i < 4; ++i) {
      ++stats_.search_pairs;
      const std::size_t a = pick(n);
      const std::size_t b = pick(n);
      std::size_t previous = table.capacity() + 1;
      for (std::size_t h = 0; h <= 4; ++h) {
        const SearchResult found = table.find_min_load_path(a, b, h, kUnbounded);
        const std::size_t best = found.path ? table.load(found.path->terminal) : table.capacity();
        if (best > previous) fail("deeper min-load search chose a fuller bucket");
        previous = best;
      }
    }
  }

  MultiGraph random_graph(std::size_t n, std::size_t m) {
    MultiGraph g(n);
    for (std::size_t i = 0; i < m; ++i) g.add_edge({pick(n), pick(n)});
    return g;
  }

  void graph_round() {
    for (int i = 0; i < 3; ++i) {
      ++stats_.operations;
      ++stats_.oracle_instances;
      const MultiGraph g = random_graph(1 + pick(8), pick(17));
      const OracleVerdict verdict = check_instance(g, 1 + pick(2));
      if (!verdict.agree()) {
        std::ostringstream text;
        write_edge_list(text, g);
        fail("online/offline disagreement on\n" + text.str());
      }
    }

    ++stats_.operations;
    ++stats_.peel_checks;
    const std::size_t n = 1 + pick(80);
    const MultiGraph g = random_graph(n, pick(3 * n));
    const std::size_t k = 1 + pick(4);
    const auto core = peel_k_core(g, k);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng_);
    if (peel_k_core(g, k, order) != core) fail("peel result depends on order");

    ++stats_.operations;
    ++stats_.witness_checks;
    for (std::size_t capacity : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
      const auto orientation = orientation_feasible(g, capacity);
      if (orientation && !orientation_respects(g, *orientation, capacity)) {
        fail("orientation witness over capacity");
      }
    }
  }

  std::mt19937_64 rng_;
  PropertyStats stats_;
};

inline PropertyStats run_property_suite(std::uint64_t seed, std::size_t min_operations) {
  return PropertyRunner(seed).run(min_operations);
}

}  // namespace twochoice::testing
