#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twochoice/bucket_table.hpp"
#include "twochoice/graph_oracle.hpp"

namespace twochoice {

enum class KeySource { sequential, random_bytes };
enum class FailureMode { stop, skip };

const char* to_string(KeySource source);
const char* to_string(FailureMode mode);
KeySource parse_key_source(const std::string& text);
FailureMode parse_failure_mode(const std::string& text);

struct ExperimentConfig {
  std::size_t buckets = 1;
  std::optional<double> average_degree;  // s; gives m = floor(s * n / 2)
  std::optional<std::size_t> items;      // explicit m, takes precedence over s
  std::size_t capacity = 2;
  InsertPolicy policy = BfsPolicy::unbounded();
  std::size_t trials = 1;
  std::uint64_t base_seed = 0;
  KeySource key_source = KeySource::sequential;
  FailureMode on_failure = FailureMode::stop;
  std::size_t threads = 0;  // 0: one per hardware thread
  PairHasher hasher;        // replaces the seeded hash family when set

  std::size_t item_count() const;
  std::uint64_t trial_seed(std::size_t trial) const { return base_seed + trial; }
};

// Throws std::invalid_argument on an unusable config.
void validate(const ExperimentConfig& config);

// Deterministic key stream: 64-bit little-endian counters, or 16 random bytes
// per key drawn from the trial seed.
class KeyStream {
 public:
  KeyStream(KeySource source, std::uint64_t seed);
  std::string next();

 private:
  KeySource source_;
  std::uint64_t counter_ = 0;
  std::uint64_t rng_state_;
};

struct CountSummary {
  double mean = 0.0;
  std::size_t max = 0;

  friend bool operator==(const CountSummary&, const CountSummary&) = default;
};

struct MoveSummary {
  double mean = 0.0;
  std::size_t max = 0;
  std::vector<std::size_t> histogram;  // histogram[k]: inserts that made k moves

  friend bool operator==(const MoveSummary&, const MoveSummary&) = default;
};

struct CycleSummary {
  std::size_t total = 0;
  std::size_t max_per_insert = 0;

  friend bool operator==(const CycleSummary&, const CycleSummary&) = default;
};

// Means are taken over all insert attempts of the trial.
struct TrialReport {
  std::string policy;
  std::uint64_t seed = 0;
  std::size_t attempted = 0;
  std::size_t inserted = 0;
  std::size_t failures = 0;
  std::optional<std::size_t> first_failure_at;
  std::size_t max_load = 0;
  std::optional<double> utilization_at_first_failure;  // stored / (B * n)
  MoveSummary moves;
  CountSummary nodes_explored;
  CountSummary depth;
  CycleSummary cycle_edges_seen;
  std::size_t stuck_events = 0;
  double wall_time_s = 0.0;

  friend bool operator==(const TrialReport&, const TrialReport&) = default;
};

struct TrialRun {
  TrialReport report;
  BucketTable table;
  std::optional<BucketPair> first_failed_pair;
};

TrialRun run_trial_detailed(const ExperimentConfig& config, std::uint64_t seed);
TrialReport run_trial(const ExperimentConfig& config, std::uint64_t seed);

// All trials, possibly in parallel, ordered by trial index.
std::vector<TrialReport> run_trials(const ExperimentConfig& config);

// Inserts until the first failure; returns stored / (B * n) at that point.
double run_fill_to_failure(const ExperimentConfig& config, std::uint64_t seed);
TrialRun fill_to_failure_detailed(const ExperimentConfig& config, std::uint64_t seed);

// One report per policy, all on the key stream of `seed`.
std::vector<TrialReport> compare_policies(const ExperimentConfig& config,
                                          const std::vector<InsertPolicy>& policies,
                                          std::uint64_t seed);

struct OracleVerdict {
  bool online = false;       // every edge placed by unbounded BFS inserts
  bool brute_force = false;
  bool flow = false;

  bool agree() const { return online == brute_force && brute_force == flow; }
};

// Feeds the edges, in order, to a capacity-limited table as scripted keys.
OracleVerdict check_instance(const MultiGraph& g, std::size_t capacity);

struct OracleCheckConfig {
  std::size_t instances = 10000;
  std::size_t max_n = 8;
  std::size_t max_m = 16;
  std::uint64_t seed = 0;
  std::size_t capacity = 2;
};

struct OracleCheckReport {
  std::size_t instances = 0;
  std::size_t feasible = 0;
  std::size_t infeasible = 0;
  std::size_t disagreements = 0;
  std::vector<std::string> disagreement_samples;  // edge lists, first few
};

// Random multigraphs with 1..max_n vertices and 0..max_m edges.
OracleCheckReport oracle_check(const OracleCheckConfig& config);

}  // namespace twochoice
