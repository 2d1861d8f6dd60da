#include <doctest.h>

#include <fstream>

#include "cxltier/config_io.hpp"
#include "cxltier/errors.hpp"
#include "support/helpers.hpp"

using namespace cxltier;
namespace fs = std::filesystem;

namespace {

fs::path source(const char* rel) { return fs::path(CXLTIER_SOURCE_DIR) / rel; }

std::vector<std::string> keys(const Json& j) {
  std::vector<std::string> out;
  for (const auto& [k, v] : j.items()) out.push_back(k);
  return out;
}

} // namespace

TEST_SUITE("config_io") {

TEST_CASE("device config round-trips") {
  DeviceConfig c;
  c.mode = StorageMode::Block;
  c.block_size = 1024;
  c.latency.translation_miss_ns = 333.5;
  c.translation_cache_entries = 7;
  CHECK(device_config_from_json(to_json(c)) == c);
  CHECK(device_config_from_json(parse_json(dump(to_json(c)))) == c);
  CHECK(device_config_from_json(Json::object()) == DeviceConfig{});
}

TEST_CASE("workload and tco round-trip") {
  WorkloadSpec w;
  w.kind = WorkloadKind::Sequential;
  w.content_profile = ContentProfile::Textlike;
  w.seed = 99;
  w.write_fraction = 0.75;
  CHECK(workload_from_json(to_json(w)) == w);
  TcoParams p;
  p.compression_ratio = 2.75;
  p.platform_base_cost = 0;
  CHECK(tco_params_from_json(to_json(p)) == p);
}

TEST_CASE("scenario round-trips through its own output") {
  const ScenarioConfig s = load_scenario(source("configs/default_scenario.json"));
  const ScenarioConfig again = parse_scenario(to_json(s), "");
  CHECK(again.device == s.device);
  CHECK(again.workload == s.workload);
  CHECK(again.output == s.output);
  CHECK(again.formats == s.formats);
  CHECK(s.workload.kind == WorkloadKind::Zipfian);
  CHECK(s.workload.telemetry_interval == 500);
}

TEST_CASE("trace scenarios resolve the trace next to the file") {
  const ScenarioConfig s = load_scenario(source("configs/scenarios/trace_replay.json"));
  CHECK(s.workload.kind == WorkloadKind::Trace);
  CHECK(s.workload.trace.size() == s.workload.op_count);
  CHECK(s.workload.op_count > 0);
  CHECK(fs::exists(s.trace_path));
  const ScenarioConfig again = parse_scenario(to_json(s), "");
  CHECK(again.workload == s.workload);
}

TEST_CASE("readers reject unknown keys and wrong types") {
  CHECK_THROWS_AS(device_config_from_json(parse_json(R"({"chanels": 4})")), ParseError);
  CHECK_NOTHROW(device_config_from_json(parse_json(R"({"comment": "x", "channels": 2})")));
  CHECK_THROWS_AS(device_config_from_json(parse_json(R"({"channels": "4"})")), ParseError);
  CHECK_THROWS_AS(device_config_from_json(parse_json(R"({"channels": -1})")), ParseError);
  CHECK_THROWS_AS(device_config_from_json(parse_json(R"({"channels": 0})")), ParseError);
  CHECK_THROWS_AS(device_config_from_json(parse_json(R"({"mode": "page"})")), ParseError);
  CHECK_THROWS_AS(device_config_from_json(parse_json(R"({"latency": {"link": 1}})")), ParseError);
  CHECK_THROWS_AS(workload_from_json(parse_json(R"({"kind": "RANDOM"})")), ParseError);
  CHECK_THROWS_AS(workload_from_json(parse_json(R"({"write_fraction": 2})")), ParseError);
  CHECK_THROWS_AS(tco_params_from_json(parse_json(R"({"compression_ratio": -1})")), ParseError);
  CHECK_THROWS_AS(tco_params_from_json(parse_json("[]")), ParseError);
}

TEST_CASE("scenario structure errors") {
  CHECK_THROWS_AS(parse_scenario(parse_json("{}"), ""), ParseError);
  CHECK_THROWS_AS(parse_scenario(parse_json(R"({"workload": {}, "extra": 1})"), ""), ParseError);
  CHECK_THROWS_AS(parse_scenario(parse_json(R"({"workload": {"kind": "TRACE"}})"), ""), ParseError);
  CHECK_THROWS_AS(parse_scenario(parse_json(R"({"workload": {"trace_path": "x.trace"}})"), ""), ParseError);
  CHECK_THROWS_AS(parse_scenario(parse_json(R"({"workload": {}, "formats": ["xml"]})"), ""), ParseError);
  CHECK_THROWS_AS(parse_scenario(parse_json(R"({"workload": {"kind": "TRACE", "trace_path": "nope.trace"}})"), ""),
                  ParseError);
  const ScenarioConfig only_csv = parse_scenario(parse_json(R"({"workload": {}, "formats": ["csv"]})"), "");
  CHECK(only_csv.wants(ReportFormat::Csv));
  CHECK_FALSE(only_csv.wants(ReportFormat::Text));
}

TEST_CASE("syntax errors carry a line number") {
  try {
    parse_json("{\n  \"a\": 1,\n  oops\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(read_json_file("/nonexistent/scenario.json"), ParseError);
}

TEST_CASE("report field names are stable") {
  RunReport r;
  r.telemetry.push_back({});
  CHECK(keys(to_json(r)) == std::vector<std::string>{"ops_executed", "demotions", "promotions",
                                                     "rejected_demotions", "device_line_reads",
                                                     "device_line_writes", "granularity_fallbacks", "shadow_checks",
                                                     "shadow_mismatches", "verified", "geomean_compression_ratio",
                                                     "line_read_latency", "request_latency", "telemetry",
                                                     "final_telemetry"});
  CHECK(to_json(r)["geomean_compression_ratio"].is_null());
  CHECK(keys(to_json(BudgetReport{})) == std::vector<std::string>{"p50_ns", "p99_ns", "p9999_ns", "bandwidth_gbps",
                                                                  "samples", "bandwidth_ok", "access_ok", "tail_ok"});
  CHECK(keys(to_json(TcoReport{})) == std::vector<std::string>{"baseline_cost_per_gb", "compressed_cost_per_gb",
                                                               "savings_fraction", "effective_capacity_gb"});
}

TEST_CASE("csv writers") {
  std::vector<TelemetrySample> series = {{0, 0, 0, 1.0, 0, 0}, {10, 8192, 256, 32.0, 3, 2}};
  CHECK(telemetry_csv(series) ==
        "ordinal,logical_bytes,physical_bytes,compression_ratio\n0,0,0,1.000000\n10,8192,256,32.000000\n");
  const std::vector<double> ratios = {1.0, 2.0};
  const std::vector<TcoReport> reports = {TcoReport{1, 1, 0.0, 1}, TcoReport{1, 1, 0.25, 1}};
  CHECK(tco_csv(ratios, reports) == "ratio,savings_fraction\n1.000000,0.000000\n2.000000,0.250000\n");
  CHECK(dump(Json{{"a", 1}}) == "{\n  \"a\": 1\n}\n");
}

}
