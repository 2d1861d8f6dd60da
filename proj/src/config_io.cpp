#include "cxltier/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cxltier/errors.hpp"

namespace cxltier {

namespace {

/// Pulls typed fields out of one JSON object and reports leftovers.
class Fields {
public:
  Fields(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ParseError(where_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    const Json& v = *it;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(key, "a boolean");
      out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_unsigned()) fail(key, "a non-negative integer");
      const auto u = v.get<std::uint64_t>();
      if (u > std::numeric_limits<T>::max()) fail(key, "a smaller integer");
      out = static_cast<T>(u);
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(key, "a number");
      out = v.get<double>();
    } else {
      if (!v.is_string()) fail(key, "a string");
      out = v.get<std::string>();
    }
  }

  const Json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  bool has(const char* key) const { return j_.contains(key); }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (key != "comment" && !seen_.contains(key)) throw ParseError(where_ + ": unknown key '" + key + "'");
    }
  }

  const std::string& where() const { return where_; }

private:
  [[noreturn]] void fail(const char* key, const char* expected) const {
    throw ParseError(where_ + "." + key + ": expected " + expected);
  }

  const Json& j_;
  std::string where_;
  std::set<std::string, std::less<>> seen_;
};

template <typename F>
auto rethrow_as_parse(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ArgumentError& e) {
    throw ParseError(where + ": " + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

} // namespace

ReportFormat format_from_name(std::string_view name) {
  if (name == "text") return ReportFormat::Text;
  if (name == "csv") return ReportFormat::Csv;
  throw ArgumentError("unknown report format '" + std::string(name) + "' (expected text or csv)");
}

std::string_view format_name(ReportFormat f) noexcept { return f == ReportFormat::Text ? "text" : "csv"; }

bool ScenarioConfig::wants(ReportFormat f) const { return std::ranges::find(formats, f) != formats.end(); }

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) line += text[i] == '\n';
    throw ParseError(e.what(), line);
  }
}

Json read_json_file(const std::filesystem::path& path) {
  try {
    return parse_json(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// writers

Json to_json(const LatencyModel& m) {
  return {{"link_ns", m.link_ns},
          {"translation_hit_ns", m.translation_hit_ns},
          {"translation_miss_ns", m.translation_miss_ns},
          {"dram_access_ns", m.dram_access_ns},
          {"decompress_per_line_ns", m.decompress_per_line_ns},
          {"compress_per_line_ns", m.compress_per_line_ns},
          {"relocation_stall_ns", m.relocation_stall_ns},
          {"compaction_stall_ns_per_kb", m.compaction_stall_ns_per_kb},
          {"power_state_ns", m.power_state_ns}};
}

Json to_json(const DeviceConfig& c) {
  return {{"mode", mode_name(c.mode)},
          {"capacity_bytes", c.capacity_bytes},
          {"channels", c.channels},
          {"transfer_rate_mtps", c.transfer_rate_mtps},
          {"decompress_engines", c.decompress_engines},
          {"engine_bytes_per_cycle", c.engine_bytes_per_cycle},
          {"clock_ghz", c.clock_ghz},
          {"translation_cache_entries", c.translation_cache_entries},
          {"block_size", c.block_size},
          {"compaction_trigger", c.compaction_trigger},
          {"latency", to_json(c.latency)}};
}

Json to_json(const WorkloadSpec& w) {
  return {{"kind", workload_kind_name(w.kind)},
          {"page_count", w.page_count},
          {"op_count", w.op_count},
          {"write_fraction", w.write_fraction},
          {"zipf_s", w.zipf_s},
          {"seed", w.seed},
          {"content_profile", profile_name(w.content_profile)},
          {"direct_capacity_pages", w.direct_capacity_pages},
          {"line_access_fraction", w.line_access_fraction},
          {"telemetry_interval", w.telemetry_interval}};
}

Json to_json(const TcoParams& p) {
  return {{"direct_dram_gb", p.direct_dram_gb},         {"cxl_dram_gb", p.cxl_dram_gb},
          {"dram_cost_per_gb", p.dram_cost_per_gb},     {"cxl_device_cost", p.cxl_device_cost},
          {"platform_base_cost", p.platform_base_cost}, {"compression_ratio", p.compression_ratio}};
}

Json to_json(const TcoReport& r) {
  return {{"baseline_cost_per_gb", r.baseline_cost_per_gb},
          {"compressed_cost_per_gb", r.compressed_cost_per_gb},
          {"savings_fraction", r.savings_fraction},
          {"effective_capacity_gb", r.effective_capacity_gb}};
}

Json to_json(const BudgetReport& r) {
  return {{"p50_ns", r.p50_ns},
          {"p99_ns", r.p99_ns},
          {"p9999_ns", r.p9999_ns},
          {"bandwidth_gbps", r.bandwidth_gbps},
          {"samples", r.samples},
          {"bandwidth_ok", r.bandwidth_ok},
          {"access_ok", r.access_ok},
          {"tail_ok", r.tail_ok}};
}

Json to_json(const TierTelemetry& t) {
  return {{"capacity_bytes", t.capacity_bytes},
          {"logical_bytes", t.logical_bytes},
          {"physical_bytes", t.physical_bytes},
          {"metadata_bytes", t.metadata_bytes},
          {"dead_bytes", t.dead_bytes},
          {"free_bytes", t.free_bytes},
          {"compression_ratio", t.compression_ratio},
          {"expansion_factor", t.expansion_factor},
          {"fragmentation", t.fragmentation},
          {"live_pages", t.live_pages}};
}

Json to_json(const TelemetrySample& s) {
  return {{"ordinal", s.ordinal},
          {"logical_bytes", s.logical_bytes},
          {"physical_bytes", s.physical_bytes},
          {"compression_ratio", s.compression_ratio},
          {"resident_pages", s.resident_pages},
          {"demoted_pages", s.demoted_pages}};
}

Json to_json(const LatencySummary& s) {
  return {{"count", s.count}, {"p50_ns", s.p50_ns}, {"p99_ns", s.p99_ns}, {"p9999_ns", s.p9999_ns}, {"max_ns", s.max_ns}};
}

Json to_json(const RunReport& r) {
  Json series = Json::array();
  for (const TelemetrySample& s : r.telemetry) series.push_back(to_json(s));
  return {{"ops_executed", r.ops_executed},
          {"demotions", r.demotions},
          {"promotions", r.promotions},
          {"rejected_demotions", r.rejected_demotions},
          {"device_line_reads", r.device_line_reads},
          {"device_line_writes", r.device_line_writes},
          {"granularity_fallbacks", r.granularity_fallbacks},
          {"shadow_checks", r.shadow_checks},
          {"shadow_mismatches", r.shadow_mismatches},
          {"verified", r.verified},
          {"geomean_compression_ratio",
           r.geomean_compression_ratio ? Json(*r.geomean_compression_ratio) : Json(nullptr)},
          {"line_read_latency", to_json(r.line_read_latency)},
          {"request_latency", to_json(r.request_latency)},
          {"telemetry", std::move(series)},
          {"final_telemetry", to_json(r.final_telemetry)}};
}

Json to_json(const FileRatio& f) {
  return {{"name", f.name}, {"logical_bytes", f.logical_bytes}, {"physical_bytes", f.physical_bytes}, {"ratio", f.ratio}};
}

Json to_json(const CorpusReport& r) {
  Json files = Json::array();
  for (const FileRatio& f : r.files) files.push_back(to_json(f));
  return {{"mode", mode_name(r.mode)}, {"page_size", r.page_size}, {"files", std::move(files)},
          {"geomean_ratio", r.geomean_ratio}};
}

Json to_json(const ScenarioConfig& s) {
  Json workload = to_json(s.workload);
  if (s.workload.kind == WorkloadKind::Trace) {
    workload.erase("op_count");
    workload.erase("page_count");
    workload["trace_path"] = s.trace_path.string();
  }
  Json formats = Json::array();
  for (ReportFormat f : s.formats) formats.push_back(format_name(f));
  return {{"device", to_json(s.device)},
          {"workload", std::move(workload)},
          {"output",
           {{"dir", s.output.dir.string()},
            {"run_report", s.output.run_report},
            {"telemetry_csv", s.output.telemetry_csv},
            {"budget_report", s.output.budget_report}}},
          {"formats", std::move(formats)}};
}

// ---------------------------------------------------------------------------
// readers

namespace {

LatencyModel latency_from_json(const Json& j) {
  LatencyModel m;
  Fields f(j, "device.latency");
  f.get("link_ns", m.link_ns);
  f.get("translation_hit_ns", m.translation_hit_ns);
  f.get("translation_miss_ns", m.translation_miss_ns);
  f.get("dram_access_ns", m.dram_access_ns);
  f.get("decompress_per_line_ns", m.decompress_per_line_ns);
  f.get("compress_per_line_ns", m.compress_per_line_ns);
  f.get("relocation_stall_ns", m.relocation_stall_ns);
  f.get("compaction_stall_ns_per_kb", m.compaction_stall_ns_per_kb);
  f.get("power_state_ns", m.power_state_ns);
  f.finish();
  return m;
}

WorkloadSpec workload_fields(Fields& f, std::string* trace_path) {
  WorkloadSpec w;
  std::string kind, profile;
  f.get("kind", kind);
  f.get("page_count", w.page_count);
  f.get("op_count", w.op_count);
  f.get("write_fraction", w.write_fraction);
  f.get("zipf_s", w.zipf_s);
  f.get("seed", w.seed);
  f.get("content_profile", profile);
  f.get("direct_capacity_pages", w.direct_capacity_pages);
  f.get("line_access_fraction", w.line_access_fraction);
  f.get("telemetry_interval", w.telemetry_interval);
  if (trace_path != nullptr) f.get("trace_path", *trace_path);
  f.finish();
  rethrow_as_parse(f.where(), [&] {
    if (!kind.empty()) w.kind = workload_kind_from_name(kind);
    if (!profile.empty()) w.content_profile = profile_from_name(profile);
    return 0;
  });
  return w;
}

} // namespace

DeviceConfig device_config_from_json(const Json& j) {
  DeviceConfig c;
  Fields f(j, "device");
  std::string mode;
  f.get("mode", mode);
  f.get("capacity_bytes", c.capacity_bytes);
  f.get("channels", c.channels);
  f.get("transfer_rate_mtps", c.transfer_rate_mtps);
  f.get("decompress_engines", c.decompress_engines);
  f.get("engine_bytes_per_cycle", c.engine_bytes_per_cycle);
  f.get("clock_ghz", c.clock_ghz);
  f.get("translation_cache_entries", c.translation_cache_entries);
  f.get("block_size", c.block_size);
  f.get("compaction_trigger", c.compaction_trigger);
  if (const Json* lat = f.child("latency")) c.latency = latency_from_json(*lat);
  f.finish();
  rethrow_as_parse("device", [&] {
    if (!mode.empty()) c.mode = mode_from_name(mode);
    c.validate();
    return 0;
  });
  return c;
}

WorkloadSpec workload_from_json(const Json& j) {
  Fields f(j, "workload");
  WorkloadSpec w = workload_fields(f, nullptr);
  if (w.kind != WorkloadKind::Trace) rethrow_as_parse("workload", [&] { return (w.validate(), 0); });
  return w;
}

TcoParams tco_params_from_json(const Json& j) {
  TcoParams p;
  Fields f(j, "tco");
  f.get("direct_dram_gb", p.direct_dram_gb);
  f.get("cxl_dram_gb", p.cxl_dram_gb);
  f.get("dram_cost_per_gb", p.dram_cost_per_gb);
  f.get("cxl_device_cost", p.cxl_device_cost);
  f.get("platform_base_cost", p.platform_base_cost);
  f.get("compression_ratio", p.compression_ratio);
  f.finish();
  rethrow_as_parse("tco", [&] { return (p.validate(), 0); });
  return p;
}

ScenarioConfig parse_scenario(const Json& j, const std::filesystem::path& base_dir) {
  ScenarioConfig s;
  Fields f(j, "scenario");
  if (const Json* dev = f.child("device")) s.device = device_config_from_json(*dev);

  const Json* wl = f.child("workload");
  if (wl == nullptr) throw ParseError("scenario: missing 'workload'");
  Fields wf(*wl, "workload");
  std::string trace_path;
  s.workload = workload_fields(wf, &trace_path);
  if (s.workload.kind == WorkloadKind::Trace) {
    if (trace_path.empty()) throw ParseError("workload: TRACE needs 'trace_path'");
    if (wf.has("op_count") || wf.has("page_count")) {
      throw ParseError("workload: op_count and page_count come from the trace file");
    }
    s.trace_path = base_dir / trace_path;
    WorkloadSpec trace;
    try {
      trace = load_trace(s.trace_path);
    } catch (const ParseError& e) {
      throw ParseError(s.trace_path.string() + ": " + e.what());
    } catch (const std::runtime_error& e) {
      throw ParseError(e.what());
    }
    s.workload.trace = std::move(trace.trace);
    s.workload.op_count = trace.op_count;
    s.workload.page_count = trace.page_count;
  } else if (!trace_path.empty()) {
    throw ParseError("workload: trace_path given for a " + std::string(workload_kind_name(s.workload.kind)) +
                     " workload");
  }
  rethrow_as_parse("workload", [&] { return (s.workload.validate(), 0); });

  if (const Json* out = f.child("output")) {
    Fields of(*out, "output");
    std::string dir;
    of.get("dir", dir);
    of.get("run_report", s.output.run_report);
    of.get("telemetry_csv", s.output.telemetry_csv);
    of.get("budget_report", s.output.budget_report);
    of.finish();
    if (!dir.empty()) s.output.dir = dir;
  }
  if (const Json* formats = f.child("formats")) {
    if (!formats->is_array()) throw ParseError("scenario.formats: expected an array");
    s.formats.clear();
    for (const Json& name : *formats) {
      if (!name.is_string()) throw ParseError("scenario.formats: expected strings");
      s.formats.push_back(rethrow_as_parse("scenario.formats", [&] { return format_from_name(name.get<std::string>()); }));
    }
  }
  f.finish();
  return s;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  try {
    return parse_scenario(j, path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

TcoParams load_tco_params(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  try {
    return tco_params_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// csv

std::string telemetry_csv(const std::vector<TelemetrySample>& series) {
  std::string out = "ordinal,logical_bytes,physical_bytes,compression_ratio\n";
  for (const TelemetrySample& s : series) {
    out += std::to_string(s.ordinal) + ',' + std::to_string(s.logical_bytes) + ',' +
           std::to_string(s.physical_bytes) + ',' + fixed(s.compression_ratio) + '\n';
  }
  return out;
}

std::string tco_csv(std::span<const double> ratios, std::span<const TcoReport> reports) {
  std::string out = "ratio,savings_fraction\n";
  for (std::size_t i = 0; i < ratios.size() && i < reports.size(); ++i) {
    out += fixed(ratios[i]) + ',' + fixed(reports[i].savings_fraction) + '\n';
  }
  return out;
}

std::string corpus_csv(const CorpusReport& r) {
  std::string out = "name,logical_bytes,physical_bytes,ratio\n";
  for (const FileRatio& f : r.files) {
    out += f.name + ',' + std::to_string(f.logical_bytes) + ',' + std::to_string(f.physical_bytes) + ',' +
           fixed(f.ratio) + '\n';
  }
  out += "geomean,,," + fixed(r.geomean_ratio) + '\n';
  return out;
}

} // namespace cxltier
