#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "cxltier/corpus.hpp"
#include "cxltier/device_model.hpp"

namespace cxltier {

enum class WorkloadKind : std::uint8_t { Uniform, Zipfian, Sequential, Trace };
std::string_view workload_kind_name(WorkloadKind k) noexcept;
WorkloadKind workload_kind_from_name(std::string_view name);

/// Host access types: page read/write and line read/write.
enum class AccessOp : std::uint8_t { R, W, RL, WL };
std::string_view access_op_name(AccessOp op) noexcept;

struct TraceOp {
  std::uint64_t ordinal = 0;
  AccessOp op = AccessOp::R;
  PageId page = 0;
  std::uint8_t line = 0;

  friend bool operator==(const TraceOp&, const TraceOp&) = default;
};

struct WorkloadSpec {
  WorkloadKind kind = WorkloadKind::Uniform;
  std::uint64_t page_count = 1024;
  std::uint64_t op_count = 20000;
  double write_fraction = 0.2;
  double zipf_s = 0.99;
  std::uint64_t seed = 42;
  ContentProfile content_profile = ContentProfile::ZeroHeavy;
  std::uint64_t direct_capacity_pages = 512;
  double line_access_fraction = 0.5;  ///< share of synthetic ops that are line-granular
  std::uint64_t telemetry_interval = 0; ///< ops between telemetry samples; 0 picks op_count / 50
  std::vector<TraceOp> trace;         ///< TRACE only; op_count == trace.size()

  /// Throws ArgumentError.
  void validate() const;

  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

/// Parses `ordinal,op,page_id,line_index` lines. `#` starts a comment line,
/// blank lines are skipped. Throws ParseError naming the 1-based line, or
/// std::runtime_error if the file cannot be read.
WorkloadSpec load_trace(const std::filesystem::path& path);
WorkloadSpec parse_trace(std::string_view text);

/// Expands a synthetic spec into its op stream (identical to what
/// run_workload executes). TRACE specs return their trace.
std::vector<TraceOp> generate_ops(const WorkloadSpec& spec);

struct ResidentPage {
  Page content{};
  std::uint64_t last_access = 0;
};

/// Direct-attached tier as seen by the host.
struct HostMemory {
  std::uint64_t direct_capacity_pages = 0;
  std::map<PageId, ResidentPage> resident;
  std::set<PageId> demoted;
  std::uint64_t clock = 0; ///< last access ordinal handed out
};

/// The k resident pages with the oldest access ordinal, ties by smaller id,
/// coldest first. Throws ArgumentError if k > |resident|.
std::vector<PageId> detect_cold_pages(const HostMemory& mem, std::size_t k);

struct MigrationResult {
  bool accepted = false;
  double latency_ns = 0.0;
  std::uint64_t physical_bytes = 0;
};

/// Host with a direct tier backed by a compressed CXL device.
class Host {
public:
  Host(std::uint64_t direct_capacity_pages, const DeviceConfig& device);

  /// Sends a resident page to the device. A capacity rejection leaves the
  /// page resident and returns accepted=false. Throws StateError if the page
  /// is not resident.
  MigrationResult demote(PageId id);

  /// Fetches a demoted page back. If the direct tier is full the coldest
  /// resident page is demoted first; throws CapacityExhausted if that fails.
  /// Throws StateError if the page is not demoted.
  MigrationResult promote(PageId id);

  /// Adds a page that has never been seen before as resident, making room
  /// as promote() does.
  void insert(PageId id, const Page& content);

  void touch(PageId id) { memory_.resident.at(id).last_access = ++memory_.clock; }
  /// Overwrites one line of a resident page and marks it accessed.
  void write_line(PageId id, std::size_t line, const CacheLine& data);

  const HostMemory& memory() const noexcept { return memory_; }
  Device& device() noexcept { return device_; }
  const Device& device() const noexcept { return device_; }

  std::uint64_t demotions() const noexcept { return demotions_; }
  std::uint64_t promotions() const noexcept { return promotions_; }
  std::uint64_t rejected_demotions() const noexcept { return rejected_; }
  const std::vector<double>& demoted_page_ratios() const noexcept { return ratios_; }

private:
  void make_room();

  HostMemory memory_;
  Device device_;
  std::uint64_t demotions_ = 0;
  std::uint64_t promotions_ = 0;
  std::uint64_t rejected_ = 0;
  std::vector<double> ratios_;
};

struct TelemetrySample {
  std::uint64_t ordinal = 0;
  std::uint64_t logical_bytes = 0;
  std::uint64_t physical_bytes = 0;
  double compression_ratio = 1.0;
  std::uint64_t resident_pages = 0;
  std::uint64_t demoted_pages = 0;
};

struct LatencySummary {
  std::uint64_t count = 0;
  double p50_ns = 0.0;
  double p99_ns = 0.0;
  double p9999_ns = 0.0;
  double max_ns = 0.0;
};

struct RunReport {
  std::uint64_t ops_executed = 0;
  std::uint64_t demotions = 0;
  std::uint64_t promotions = 0;
  std::uint64_t rejected_demotions = 0;
  std::uint64_t device_line_reads = 0;
  std::uint64_t device_line_writes = 0;
  std::uint64_t granularity_fallbacks = 0; ///< line writes that had to promote instead
  std::uint64_t shadow_checks = 0;
  std::uint64_t shadow_mismatches = 0;
  bool verified = false;                   ///< final full comparison against the shadow map
  std::optional<double> geomean_compression_ratio; ///< over demotions; empty if none
  LatencySummary line_read_latency;
  LatencySummary request_latency;
  std::vector<TelemetrySample> telemetry;
  TierTelemetry final_telemetry;
};

struct SimulationResult {
  RunReport report;
  ScenarioStats stats;
};

/// Runs the host workflow: accesses hit the direct tier, miss into demoted
/// pages (page ops promote, line ops go to the device), and whenever
/// resident occupancy exceeds 90% the coldest 10% of capacity is demoted.
/// Deterministic in (spec, device). Throws ArgumentError on an invalid spec or
/// config, CapacityExhausted if the working set fits in neither tier.
SimulationResult simulate(const WorkloadSpec& spec, const DeviceConfig& device);
inline RunReport run_workload(const WorkloadSpec& spec, const DeviceConfig& device) {
  return simulate(spec, device).report;
}

} // namespace cxltier
