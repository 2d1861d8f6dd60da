#pragma once

// JSON documents for configs and reports. Field names match the C++ member
// names. Readers reject unknown keys (except "comment") and wrong types with
// ParseError; omitted keys keep their defaults.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cxltier/bench.hpp"
#include "cxltier/device_model.hpp"
#include "cxltier/host_emulator.hpp"
#include "cxltier/tco_model.hpp"

namespace cxltier {

using Json = nlohmann::ordered_json;

struct OutputConfig {
  std::filesystem::path dir = "out";
  std::string run_report = "run_report.json";
  std::string telemetry_csv = "telemetry.csv";
  std::string budget_report = "budget_report.json";

  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

enum class ReportFormat : std::uint8_t { Text, Csv };

struct ScenarioConfig {
  DeviceConfig device;
  WorkloadSpec workload;
  std::filesystem::path trace_path; ///< TRACE workloads, resolved against the scenario file
  OutputConfig output;
  std::vector<ReportFormat> formats = {ReportFormat::Text, ReportFormat::Csv};

  bool wants(ReportFormat f) const;
};

ReportFormat format_from_name(std::string_view name);
std::string_view format_name(ReportFormat f) noexcept;

/// Parses JSON text; syntax errors become ParseError with the line number.
Json parse_json(std::string_view text);
/// Reads and parses a file. Throws ParseError (also for unreadable files).
Json read_json_file(const std::filesystem::path& path);

Json to_json(const LatencyModel& m);
Json to_json(const DeviceConfig& c);
Json to_json(const WorkloadSpec& w);
Json to_json(const TcoParams& p);
Json to_json(const TcoReport& r);
Json to_json(const BudgetReport& r);
Json to_json(const TierTelemetry& t);
Json to_json(const TelemetrySample& s);
Json to_json(const LatencySummary& s);
Json to_json(const RunReport& r);
Json to_json(const FileRatio& f);
Json to_json(const CorpusReport& r);
Json to_json(const ScenarioConfig& s);

DeviceConfig device_config_from_json(const Json& j);
/// TRACE workloads carry no ops here; see load_scenario().
WorkloadSpec workload_from_json(const Json& j);
TcoParams tco_params_from_json(const Json& j);

/// Parses and validates a scenario. A TRACE workload's trace_path is resolved
/// relative to `base_dir` and loaded.
ScenarioConfig parse_scenario(const Json& j, const std::filesystem::path& base_dir);
ScenarioConfig load_scenario(const std::filesystem::path& path);
TcoParams load_tco_params(const std::filesystem::path& path);

std::string telemetry_csv(const std::vector<TelemetrySample>& series);
std::string tco_csv(std::span<const double> ratios, std::span<const TcoReport> reports);
std::string corpus_csv(const CorpusReport& r);

/// Two-space indented JSON followed by a newline.
std::string dump(const Json& j);

} // namespace cxltier
