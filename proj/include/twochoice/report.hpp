#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "twochoice/harness.hpp"
#include "json.hpp"

namespace twochoice {

inline constexpr int kReportSchemaVersion = 1;

enum class ReportFormat { json, csv };

ReportFormat parse_report_format(const std::string& text);

struct RunReport {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<TrialReport> trials;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

nlohmann::json config_json(const ExperimentConfig& config);

nlohmann::json to_json(const TrialReport& report);
TrialReport trial_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunReport& report);
// Throws std::runtime_error on a schema_version mismatch.
RunReport run_report_from_json(const nlohmann::json& j);

// One row per trial; the move histogram becomes moves_hist_<k> columns.
std::string to_csv(const RunReport& report);

std::string render_report(const RunReport& report, ReportFormat format);
// Throws std::runtime_error naming the path when it cannot be written.
void emit_report(const RunReport& report, ReportFormat format, const std::filesystem::path& path);

}  // namespace twochoice
