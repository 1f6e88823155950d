#include "twochoice/report.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace twochoice {

using nlohmann::json;

namespace {

template <class T>
json optional_json(const std::optional<T>& value) {
  return value ? json(*value) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& j, const char* field) {
  const json& value = j.at(field);
  if (value.is_null()) return std::nullopt;
  return value.get<T>();
}

json summary_json(const CountSummary& s) { return {{"mean", s.mean}, {"max", s.max}}; }

CountSummary summary_from(const json& j) {
  return {j.at("mean").get<double>(), j.at("max").get<std::size_t>()};
}

template <class T>
std::string csv_cell(const std::optional<T>& value) {
  if (!value) return "";
  std::ostringstream out;
  out.precision(17);
  out << *value;
  return out.str();
}

}  // namespace

ReportFormat parse_report_format(const std::string& text) {
  if (text == "json") return ReportFormat::json;
  if (text == "csv") return ReportFormat::csv;
  throw std::invalid_argument("unknown report format: " + text);
}

json config_json(const ExperimentConfig& config) {
  return {{"n", config.buckets},
          {"m", config.item_count()},
          {"s", optional_json(config.average_degree)},
          {"capacity", config.capacity},
          {"policy", to_string(config.policy)},
          {"trials", config.trials},
          {"base_seed", config.base_seed},
          {"key_source", to_string(config.key_source)},
          {"on_failure", to_string(config.on_failure)}};
}

json to_json(const TrialReport& r) {
  return {{"policy", r.policy},
          {"seed", r.seed},
          {"attempted", r.attempted},
          {"inserted", r.inserted},
          {"failures", r.failures},
          {"first_failure_at", optional_json(r.first_failure_at)},
          {"max_load", r.max_load},
          {"utilization_at_first_failure", optional_json(r.utilization_at_first_failure)},
          {"moves", {{"mean", r.moves.mean}, {"max", r.moves.max}, {"histogram", r.moves.histogram}}},
          {"nodes_explored", summary_json(r.nodes_explored)},
          {"depth", summary_json(r.depth)},
          {"cycle_edges_seen",
           {{"total", r.cycle_edges_seen.total},
            {"max_per_insert", r.cycle_edges_seen.max_per_insert}}},
          {"stuck_events", r.stuck_events},
          {"wall_time_s", r.wall_time_s}};
}

TrialReport trial_report_from_json(const json& j) {
  TrialReport r;
  r.policy = j.at("policy").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.attempted = j.at("attempted").get<std::size_t>();
  r.inserted = j.at("inserted").get<std::size_t>();
  r.failures = j.at("failures").get<std::size_t>();
  r.first_failure_at = optional_from<std::size_t>(j, "first_failure_at");
  r.max_load = j.at("max_load").get<std::size_t>();
  r.utilization_at_first_failure = optional_from<double>(j, "utilization_at_first_failure");
  const json& moves = j.at("moves");
  r.moves.mean = moves.at("mean").get<double>();
  r.moves.max = moves.at("max").get<std::size_t>();
  r.moves.histogram = moves.at("histogram").get<std::vector<std::size_t>>();
  r.nodes_explored = summary_from(j.at("nodes_explored"));
  r.depth = summary_from(j.at("depth"));
  r.cycle_edges_seen.total = j.at("cycle_edges_seen").at("total").get<std::size_t>();
  r.cycle_edges_seen.max_per_insert =
      j.at("cycle_edges_seen").at("max_per_insert").get<std::size_t>();
  r.stuck_events = j.at("stuck_events").get<std::size_t>();
  r.wall_time_s = j.at("wall_time_s").get<double>();
  return r;
}

json to_json(const RunReport& report) {
  json trials = json::array();
  for (const TrialReport& t : report.trials) trials.push_back(to_json(t));
  return {{"schema_version", kReportSchemaVersion},
          {"command", report.command},
          {"config", report.config},
          {"trials", std::move(trials)}};
}

RunReport run_report_from_json(const json& j) {
  const int version = j.at("schema_version").get<int>();
  if (version != kReportSchemaVersion) {
    throw std::runtime_error("unsupported report schema_version " + std::to_string(version));
  }
  RunReport report;
  report.command = j.at("command").get<std::string>();
  report.config = j.at("config");
  for (const json& t : j.at("trials")) report.trials.push_back(trial_report_from_json(t));
  return report;
}

std::string to_csv(const RunReport& report) {
  std::size_t histogram_width = 0;
  for (const TrialReport& t : report.trials) {
    histogram_width = std::max(histogram_width, t.moves.histogram.size());
  }

  std::ostringstream out;
  out.precision(17);
  out << "schema_version,command,policy,seed,attempted,inserted,failures,first_failure_at,"
         "max_load,utilization_at_first_failure,moves_mean,moves_max,nodes_explored_mean,"
         "nodes_explored_max,depth_mean,depth_max,cycle_edges_total,cycle_edges_max_per_insert,"
         "stuck_events,wall_time_s";
  for (std::size_t k = 0; k < histogram_width; ++k) out << ",moves_hist_" << k;
  out << '\n';
  for (const TrialReport& t : report.trials) {
    out << kReportSchemaVersion << ',' << report.command << ',' << t.policy << ',' << t.seed << ','
        << t.attempted << ',' << t.inserted << ',' << t.failures << ','
        << csv_cell(t.first_failure_at) << ',' << t.max_load << ','
        << csv_cell(t.utilization_at_first_failure) << ',' << t.moves.mean << ',' << t.moves.max
        << ',' << t.nodes_explored.mean << ',' << t.nodes_explored.max << ',' << t.depth.mean
        << ',' << t.depth.max << ',' << t.cycle_edges_seen.total << ','
        << t.cycle_edges_seen.max_per_insert << ',' << t.stuck_events << ',' << t.wall_time_s;
    for (std::size_t k = 0; k < histogram_width; ++k) {
      out << ',' << (k < t.moves.histogram.size() ? t.moves.histogram[k] : 0);
    }
    out << '\n';
  }
  return out.str();
}

std::string render_report(const RunReport& report, ReportFormat format) {
  return format == ReportFormat::json ? to_json(report).dump(2) + "\n" : to_csv(report);
}

void emit_report(const RunReport& report, ReportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open report file " + path.string());
  out << render_report(report, format);
  out.flush();
  if (!out) throw std::runtime_error("failed writing report file " + path.string());
}

}  // namespace twochoice
