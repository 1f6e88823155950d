// Experiment driver. Exit codes: 0 success, 1 invariant violation, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "twochoice/graph_oracle.hpp"
#include "twochoice/harness.hpp"
#include "twochoice/report.hpp"
#include "twochoice/threshold.hpp"

namespace {

using namespace twochoice;

constexpr int kViolation = 1;
constexpr int kUsage = 2;

// Thrown for bad flag values that CLI11 cannot catch on its own.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct WorkloadFlags {
  std::size_t n = 0;
  std::optional<double> s;
  std::optional<std::size_t> m;
  std::size_t capacity = 2;
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  std::string keys = "sequential";
  std::size_t threads = 0;
};

struct OutputFlags {
  std::string out;
  std::string format = "json";
  bool no_timing = false;
};

void add_workload(CLI::App& cmd, WorkloadFlags& w, bool with_load) {
  cmd.add_option("--n", w.n, "bucket count")->required();
  if (with_load) {
    auto* s = cmd.add_option("--s", w.s, "average degree; m = floor(s n / 2)");
    auto* m = cmd.add_option("--m", w.m, "item count");
    s->excludes(m);
  }
  cmd.add_option("--capacity", w.capacity, "slots per bucket")->capture_default_str();
  cmd.add_option("--seed", w.seed, "base seed; trial t uses seed + t")->capture_default_str();
  cmd.add_option("--keys", w.keys, "sequential | random-bytes")->capture_default_str();
  cmd.add_option("--threads", w.threads, "worker threads, 0 for one per core");
}

void add_output(CLI::App& cmd, OutputFlags& o) {
  cmd.add_option("--out", o.out, "report path (default stdout)");
  cmd.add_option("--format", o.format, "json | csv")->capture_default_str();
  cmd.add_flag("--no-timing", o.no_timing, "zero wall_time for byte-stable reports");
}

ExperimentConfig build_config(const WorkloadFlags& w, const std::string& policy) {
  ExperimentConfig config;
  config.buckets = w.n;
  config.average_degree = w.s;
  config.items = w.m;
  config.capacity = w.capacity;
  config.trials = w.trials;
  config.base_seed = w.seed;
  config.threads = w.threads;
  try {
    config.key_source = parse_key_source(w.keys);
    config.policy = parse_policy(policy, std::max<std::size_t>(w.n, 1));
    validate(config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return config;
}

ReportFormat format_of(const OutputFlags& o) {
  try {
    return parse_report_format(o.format);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void write_report(RunReport report, const OutputFlags& o) {
  const ReportFormat format = format_of(o);
  if (o.no_timing) {
    for (TrialReport& t : report.trials) t.wall_time_s = 0.0;
  }
  if (o.out.empty()) {
    std::cout << render_report(report, format);
  } else {
    emit_report(report, format, o.out);
  }
}

// Report fields that must hold for any trial, failures or not.
int check_reports(const std::vector<TrialReport>& reports, std::size_t capacity) {
  for (const TrialReport& r : reports) {
    const bool util_ok =
        !r.utilization_at_first_failure ||
        (*r.utilization_at_first_failure >= 0.0 && *r.utilization_at_first_failure <= 1.0);
    if (r.max_load > capacity || !util_ok || r.inserted + r.failures > r.attempted) {
      std::cerr << "report invariant violated for seed " << r.seed << '\n';
      return kViolation;
    }
  }
  return 0;
}

void print_trial_summary(const std::vector<TrialReport>& reports) {
  for (const TrialReport& r : reports) {
    std::cerr << r.policy << " seed " << r.seed << ": inserted " << r.inserted << ", failures "
              << r.failures << ", max_load " << r.max_load << ", moves max " << r.moves.max
              << ", nodes mean " << r.nodes_explored.mean << '\n';
  }
}

int cmd_run(const WorkloadFlags& w, const std::string& policy, const std::string& on_failure,
            const OutputFlags& o) {
  if (!w.s && !w.m) throw UsageError("run needs --s or --m");
  ExperimentConfig config = build_config(w, policy);
  try {
    config.on_failure = parse_failure_mode(on_failure);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  format_of(o);
  const auto reports = run_trials(config);
  print_trial_summary(reports);
  write_report(RunReport{"run", config_json(config), reports}, o);
  return check_reports(reports, config.capacity);
}

int cmd_fill(const WorkloadFlags& w, const std::string& policy, const OutputFlags& o) {
  ExperimentConfig config = build_config(w, policy);
  format_of(o);
  std::vector<TrialReport> reports;
  double total = 0.0;
  for (std::size_t t = 0; t < config.trials; ++t) {
    const TrialRun run = fill_to_failure_detailed(config, config.trial_seed(t));
    const double u = run.report.utilization_at_first_failure.value_or(1.0);
    const double recomputed = static_cast<double>(run.table.size()) /
                              static_cast<double>(config.capacity * config.buckets);
    if (run.report.utilization_at_first_failure && u != recomputed) {
      std::cerr << "utilization disagrees with the final table for seed " << run.report.seed << '\n';
      return kViolation;
    }
    std::cerr << "seed " << run.report.seed << ": utilization " << u << '\n';
    total += u;
    reports.push_back(run.report);
  }
  std::cerr << "mean utilization " << total / static_cast<double>(config.trials) << '\n';
  nlohmann::json cfg = config_json(config);
  cfg["m"] = nullptr;
  write_report(RunReport{"fill", cfg, reports}, o);
  return check_reports(reports, config.capacity);
}

int cmd_compare(const WorkloadFlags& w, const std::vector<std::string>& names, const OutputFlags& o) {
  if (!w.s && !w.m) throw UsageError("compare needs --s or --m");
  if (names.empty()) throw UsageError("compare needs at least one policy");
  ExperimentConfig config = build_config(w, names.front());
  std::vector<InsertPolicy> policies;
  try {
    for (const std::string& name : names) policies.push_back(parse_policy(name, w.n));
    for (const InsertPolicy& p : policies) validate(p);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  format_of(o);
  const auto reports = compare_policies(config, policies, config.base_seed);
  print_trial_summary(reports);
  nlohmann::json cfg = config_json(config);
  cfg["policy"] = names;
  cfg["trials"] = 1;
  write_report(RunReport{"compare", cfg, reports}, o);
  return check_reports(reports, config.capacity);
}

int cmd_threshold(double lo, double hi, double tol) {
  if (!(tol > 0.0) || !(lo < hi)) throw UsageError("threshold needs lo < hi and tol > 0");
  double s = 0.0;
  try {
    s = threshold_bisect(lo, hi, tol);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kViolation;
  }
  const PositivityResult below = positivity_scan(s - tol);
  const PositivityResult above = positivity_scan(s + tol);
  std::printf("threshold %.6f\n", s);
  std::printf("positivity below %s, above %s\n", below.positive ? "holds" : "fails",
              above.positive ? "holds" : "fails");
  return 0;
}

int cmd_recurrence(double s, double target, std::size_t max_iters, const std::string& out) {
  if (!(s > 0.0)) throw UsageError("--s must be positive");
  if (!(target > 0.0)) throw UsageError("--target must be positive");
  const RecurrenceTrace trace = iterate_recurrence(s, {.target = target, .max_iters = max_iters});
  std::ostringstream csv;
  csv.precision(17);
  csv << "iteration,p\n";
  for (std::size_t i = 0; i < trace.p.size(); ++i) csv << i << ',' << trace.p[i] << '\n';
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    if (!(file << csv.str())) throw std::runtime_error("cannot write trace file " + out);
  }
  std::cerr << "s " << s << ": " << to_string(trace.terminated_by) << " after "
            << trace.p.size() - 1 << " iterations, p = " << trace.p.back() << '\n';
  return 0;
}

int cmd_oracle_check(const OracleCheckConfig& config, const std::string& graph_path) {
  if (!graph_path.empty()) {
    std::ifstream in(graph_path);
    if (!in) throw std::runtime_error("cannot open graph file " + graph_path);
    const OracleVerdict v = check_instance(read_edge_list(in), config.capacity);
    std::printf("online %d brute_force %d flow %d\n", v.online, v.brute_force, v.flow);
    return v.agree() ? 0 : kViolation;
  }
  OracleCheckReport report;
  try {
    report = oracle_check(config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::printf("instances %zu feasible %zu infeasible %zu disagreements %zu\n", report.instances,
              report.feasible, report.infeasible, report.disagreements);
  for (const std::string& sample : report.disagreement_samples) std::printf("---\n%s", sample.c_str());
  return report.disagreements == 0 ? 0 : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-choice hashing experiments"};
  app.require_subcommand(1);

  WorkloadFlags run_w;
  OutputFlags run_o;
  std::string run_policy = "bfs";
  std::string on_failure = "stop";
  auto* run = app.add_subcommand("run", "seeded insert trials");
  add_workload(*run, run_w, true);
  run->add_option("--policy", run_policy, "bfs | bfs:inf | bfs:<depth>:<nodes> | depth:<h> | walk:<steps> | greedy")
      ->capture_default_str();
  run->add_option("--trials", run_w.trials)->capture_default_str();
  run->add_option("--on-failure", on_failure, "stop | skip")->capture_default_str();
  add_output(*run, run_o);

  WorkloadFlags fill_w;
  OutputFlags fill_o;
  std::string fill_policy = "bfs:inf";
  auto* fill = app.add_subcommand("fill", "insert until the first failure");
  add_workload(*fill, fill_w, false);
  fill->add_option("--policy", fill_policy)->capture_default_str();
  fill->add_option("--trials", fill_w.trials)->capture_default_str();
  add_output(*fill, fill_o);

  WorkloadFlags cmp_w;
  OutputFlags cmp_o;
  std::vector<std::string> policies{"greedy", "depth:1", "bfs"};
  auto* compare = app.add_subcommand("compare", "policies on one key stream");
  add_workload(*compare, cmp_w, true);
  compare->add_option("--policies", policies, "comma-separated policy list")
      ->delimiter(',')
      ->capture_default_str();
  add_output(*compare, cmp_o);

  double lo = 3.0;
  double hi = 4.0;
  double tol = 1e-3;
  auto* threshold = app.add_subcommand("threshold", "bisect the recurrence threshold");
  threshold->add_option("--lo", lo)->capture_default_str();
  threshold->add_option("--hi", hi)->capture_default_str();
  threshold->add_option("--tol", tol)->capture_default_str();

  double rec_s = 0.0;
  double target = 1e-9;
  std::size_t max_iters = 10000;
  std::string trace_out;
  auto* recurrence = app.add_subcommand("recurrence", "trace of p_i as CSV");
  recurrence->add_option("--s", rec_s)->required();
  recurrence->add_option("--target", target)->capture_default_str();
  recurrence->add_option("--max-iters", max_iters)->capture_default_str();
  recurrence->add_option("--out", trace_out, "CSV path (default stdout)");

  OracleCheckConfig oracle;
  std::string graph_path;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "online insertion vs offline oracles");
  oracle_cmd->add_option("--instances", oracle.instances)->capture_default_str();
  oracle_cmd->add_option("--max-n", oracle.max_n)->capture_default_str();
  oracle_cmd->add_option("--max-m", oracle.max_m)->capture_default_str();
  oracle_cmd->add_option("--seed", oracle.seed)->capture_default_str();
  oracle_cmd->add_option("--capacity", oracle.capacity)->capture_default_str();
  oracle_cmd->add_option("--graph", graph_path, "edge-list file: 'n m' then m lines 'u v'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(run_w, run_policy, on_failure, run_o);
    if (*fill) return cmd_fill(fill_w, fill_policy, fill_o);
    if (*compare) return cmd_compare(cmp_w, policies, cmp_o);
    if (*threshold) return cmd_threshold(lo, hi, tol);
    if (*recurrence) return cmd_recurrence(rec_s, target, max_iters, trace_out);
    if (*oracle_cmd) return cmd_oracle_check(oracle, graph_path);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kViolation;
  }
  return kUsage;
}
