#include "twochoice/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace twochoice {

namespace {

std::string le_bytes(std::uint64_t x) {
  std::string out(8, '\0');
  for (int i = 0; i < 8; ++i) out[i] = static_cast<char>((x >> (8 * i)) & 0xff);
  return out;
}

struct TrialAccumulator {
  std::size_t nodes_total = 0;
  std::size_t depth_total = 0;
  std::size_t moves_total = 0;

  void add(TrialReport& report, const InsertReceipt& receipt) {
    ++report.attempted;
    nodes_total += receipt.nodes_explored;
    depth_total += receipt.depth;
    moves_total += receipt.moves;
    report.nodes_explored.max = std::max(report.nodes_explored.max, receipt.nodes_explored);
    report.depth.max = std::max(report.depth.max, receipt.depth);
    report.moves.max = std::max(report.moves.max, receipt.moves);
    if (report.moves.histogram.size() <= receipt.moves) {
      report.moves.histogram.resize(receipt.moves + 1, 0);
    }
    ++report.moves.histogram[receipt.moves];
    report.cycle_edges_seen.total += receipt.cycle_edges_seen;
    report.cycle_edges_seen.max_per_insert =
        std::max(report.cycle_edges_seen.max_per_insert, receipt.cycle_edges_seen);
    if (receipt.stuck) ++report.stuck_events;
  }

  void finish(TrialReport& report) const {
    if (report.attempted == 0) return;
    const auto attempts = static_cast<double>(report.attempted);
    report.nodes_explored.mean = static_cast<double>(nodes_total) / attempts;
    report.depth.mean = static_cast<double>(depth_total) / attempts;
    report.moves.mean = static_cast<double>(moves_total) / attempts;
  }
};

}  // namespace

const char* to_string(KeySource source) {
  return source == KeySource::sequential ? "sequential" : "random-bytes";
}

const char* to_string(FailureMode mode) { return mode == FailureMode::stop ? "stop" : "skip"; }

KeySource parse_key_source(const std::string& text) {
  if (text == "sequential" || text == "sequential-integers") return KeySource::sequential;
  if (text == "random-bytes" || text == "random") return KeySource::random_bytes;
  throw std::invalid_argument("unknown key source: " + text);
}

FailureMode parse_failure_mode(const std::string& text) {
  if (text == "stop") return FailureMode::stop;
  if (text == "skip") return FailureMode::skip;
  throw std::invalid_argument("unknown failure mode: " + text);
}

std::size_t ExperimentConfig::item_count() const {
  if (items) return *items;
  if (average_degree) {
    return static_cast<std::size_t>(std::floor(*average_degree * static_cast<double>(buckets) / 2.0));
  }
  return 0;
}

void validate(const ExperimentConfig& config) {
  if (config.buckets < 1) throw std::invalid_argument("n must be >= 1");
  if (config.capacity < 1) throw std::invalid_argument("capacity must be >= 1");
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (config.average_degree && !(*config.average_degree >= 0.0)) {
    throw std::invalid_argument("s must be non-negative");
  }
  validate(config.policy);
}

KeyStream::KeyStream(KeySource source, std::uint64_t seed)
    : source_(source), rng_state_(seed ^ 0x6a09e667f3bcc909ULL) {}

std::string KeyStream::next() {
  if (source_ == KeySource::sequential) return le_bytes(counter_++);
  ++counter_;
  return le_bytes(splitmix64(rng_state_)) + le_bytes(splitmix64(rng_state_));
}

TrialRun run_trial_detailed(const ExperimentConfig& config, std::uint64_t seed) {
  validate(config);
  const auto started = std::chrono::steady_clock::now();

  TrialRun run{TrialReport{}, BucketTable(TableConfig{config.buckets, config.capacity,
                                                      derive_seeds(seed)},
                                          config.hasher),
               std::nullopt};
  TrialReport& report = run.report;
  BucketTable& table = run.table;
  report.policy = to_string(config.policy);
  report.seed = seed;

  KeyStream keys(config.key_source, seed);
  TrialAccumulator totals;
  const std::size_t m = config.item_count();
  const double slots = static_cast<double>(config.capacity) * static_cast<double>(config.buckets);
  for (std::size_t i = 0; i < m; ++i) {
    std::string key = keys.next();
    const BucketPair pair = table.pair_for(key);
    const InsertReceipt receipt = table.insert(std::move(key), le_bytes(i), config.policy);
    totals.add(report, receipt);
    if (receipt.outcome == InsertOutcome::placed) {
      ++report.inserted;
    } else if (receipt.outcome == InsertOutcome::table_full_failure) {
      ++report.failures;
      if (!report.first_failure_at) {
        report.first_failure_at = i;
        report.utilization_at_first_failure = static_cast<double>(table.size()) / slots;
        run.first_failed_pair = pair;
      }
      if (config.on_failure == FailureMode::stop) break;
    }
  }
  totals.finish(report);
  report.max_load = table.max_load();
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return run;
}

TrialReport run_trial(const ExperimentConfig& config, std::uint64_t seed) {
  return run_trial_detailed(config, seed).report;
}

std::vector<TrialReport> run_trials(const ExperimentConfig& config) {
  validate(config);
  std::vector<TrialReport> reports(config.trials);
  std::vector<std::exception_ptr> errors(config.trials);
  std::size_t workers = config.threads ? config.threads : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, config.trials);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t = next++; t < config.trials; t = next++) {
      try {
        reports[t] = run_trial(config, config.trial_seed(t));
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return reports;
}

TrialRun fill_to_failure_detailed(const ExperimentConfig& config, std::uint64_t seed) {
  ExperimentConfig fill = config;
  // One more key than there are slots, so a failure is certain.
  fill.items = config.capacity * config.buckets + 1;
  fill.average_degree.reset();
  fill.on_failure = FailureMode::stop;
  return run_trial_detailed(fill, seed);
}

double run_fill_to_failure(const ExperimentConfig& config, std::uint64_t seed) {
  const TrialRun run = fill_to_failure_detailed(config, seed);
  return run.report.utilization_at_first_failure.value_or(1.0);
}

std::vector<TrialReport> compare_policies(const ExperimentConfig& config,
                                          const std::vector<InsertPolicy>& policies,
                                          std::uint64_t seed) {
  std::vector<TrialReport> rows;
  rows.reserve(policies.size());
  for (const InsertPolicy& policy : policies) {
    ExperimentConfig variant = config;
    variant.policy = policy;
    rows.push_back(run_trial(variant, seed));
  }
  return rows;
}

OracleVerdict check_instance(const MultiGraph& g, std::size_t capacity) {
  OracleVerdict verdict;
  BucketTable table(TableConfig{g.vertex_count(), capacity, {}}, scripted_hasher());
  verdict.online = true;
  const auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto receipt = table.insert(scripted_key(i, {edges[i].u, edges[i].v}), {},
                                      BfsPolicy::unbounded());
    if (receipt.outcome != InsertOutcome::placed) {
      verdict.online = false;
      break;
    }
  }
  table.check_invariants();

  verdict.brute_force = brute_force_feasible(g, capacity);
  const auto orientation = orientation_feasible(g, capacity);
  if (orientation && !orientation_respects(g, *orientation, capacity)) {
    throw InvariantViolation("flow oracle returned an orientation over capacity");
  }
  verdict.flow = orientation.has_value();
  return verdict;
}

OracleCheckReport oracle_check(const OracleCheckConfig& config) {
  if (config.max_n < 1) throw std::invalid_argument("max_n must be >= 1");
  if (config.max_m > 20) throw std::invalid_argument("max_m must be <= 20 for brute force");
  OracleCheckReport report;
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick_n(1, config.max_n);
  std::uniform_int_distribution<std::size_t> pick_m(0, config.max_m);
  for (std::size_t instance = 0; instance < config.instances; ++instance) {
    const std::size_t n = pick_n(rng);
    const std::size_t m = pick_m(rng);
    std::uniform_int_distribution<std::size_t> pick_vertex(0, n - 1);
    MultiGraph g(n);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t u = pick_vertex(rng);
      g.add_edge({u, pick_vertex(rng)});
    }
    const OracleVerdict verdict = check_instance(g, config.capacity);
    ++report.instances;
    ++(verdict.flow ? report.feasible : report.infeasible);
    if (!verdict.agree()) {
      ++report.disagreements;
      if (report.disagreement_samples.size() < 8) {
        std::ostringstream out;
        write_edge_list(out, g);
        report.disagreement_samples.push_back(out.str());
      }
    }
  }
  return report;
}

}  // namespace twochoice
