#pragma once

#include <cstdint>
#include <list>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cxltier/tier_store.hpp"

namespace cxltier {

/// Per-stage nanosecond costs. A request's latency is the sum of the stages
/// it traverses; there is no queuing.
struct LatencyModel {
  double link_ns = 25.0;               ///< each direction
  double translation_hit_ns = 40.0;
  double translation_miss_ns = 120.0;
  double dram_access_ns = 60.0;
  double decompress_per_line_ns = 8.0;
  double compress_per_line_ns = 10.0;
  double relocation_stall_ns = 150.0;
  double compaction_stall_ns_per_kb = 50.0;
  double power_state_ns = 0.0;         ///< optional wake-up cost, charged on line accesses when > 0

  friend bool operator==(const LatencyModel&, const LatencyModel&) = default;
};

struct DeviceConfig {
  StorageMode mode = StorageMode::Cacheline;
  std::uint64_t capacity_bytes = 64ull << 20;
  std::uint32_t channels = 4;
  double transfer_rate_mtps = 1867.0;
  std::uint32_t decompress_engines = 1;
  double engine_bytes_per_cycle = 64.0;
  double clock_ghz = 1.2;
  std::uint32_t translation_cache_entries = 1024;
  std::uint32_t block_size = 4096;
  double compaction_trigger = 0.25;
  LatencyModel latency;

  /// Throws ArgumentError on any invariant violation.
  void validate() const;

  friend bool operator==(const DeviceConfig&, const DeviceConfig&) = default;
};

/// Modeled decompression bandwidth in GB/s: engines x bytes/cycle x GHz.
double modeled_decompress_bandwidth(const DeviceConfig& cfg) noexcept;
/// Aggregate DRAM channel bandwidth in GB/s (8-byte wide channels).
double channel_bandwidth(const DeviceConfig& cfg) noexcept;

inline constexpr double kAccessBudgetNs = 250.0;
inline constexpr double kTailBudgetNs = 1000.0;
inline constexpr double kBandwidthBudgetGBps = 46.0;

enum class Opcode : std::uint8_t { ReadLine, WriteLine, MigratePageIn, MigratePageOut, Config, Telemetry };
std::string_view opcode_name(Opcode op) noexcept;

enum class Status : std::uint8_t {
  Ok,
  NotFound,
  StateError,
  ArgumentError,
  CapacityExhausted,
  UnsupportedGranularity,
  FormatError,
};
std::string_view status_name(Status s) noexcept;

struct CxlRequest {
  Opcode op = Opcode::Telemetry;
  PageId page = 0;
  std::uint8_t line = 0;
  std::vector<std::uint8_t> data;     ///< 64 bytes for WRITE_LINE, 4096 for MIGRATE_PAGE_IN
  std::optional<DeviceConfig> config; ///< CONFIG only

  static CxlRequest read_line(PageId page, std::uint8_t line) { return {Opcode::ReadLine, page, line, {}, {}}; }
  static CxlRequest write_line(PageId page, std::uint8_t line, std::span<const std::uint8_t> bytes) {
    return {Opcode::WriteLine, page, line, {bytes.begin(), bytes.end()}, {}};
  }
  static CxlRequest migrate_in(PageId page, std::span<const std::uint8_t> bytes) {
    return {Opcode::MigratePageIn, page, 0, {bytes.begin(), bytes.end()}, {}};
  }
  static CxlRequest migrate_out(PageId page) { return {Opcode::MigratePageOut, page, 0, {}, {}}; }
  static CxlRequest configure(const DeviceConfig& cfg) { return {Opcode::Config, 0, 0, {}, cfg}; }
  static CxlRequest telemetry() { return {}; }
};

struct Stage {
  std::string_view name;
  double ns = 0.0;
};

struct CxlResponse {
  Status status = Status::Ok;
  std::string message;
  std::vector<std::uint8_t> data;
  double latency_ns = 0.0;
  std::vector<Stage> stages;
  std::optional<TierTelemetry> telemetry;
  std::uint64_t physical_bytes = 0; ///< MIGRATE_PAGE_IN: bytes charged for the page
  bool relocated = false;           ///< WRITE_LINE: size class changed
  bool compaction = false;          ///< request triggered a compaction
};

struct RequestSample {
  Opcode op;
  Status status;
  double latency_ns;
};

/// Latency samples collected over a run.
struct ScenarioStats {
  std::vector<RequestSample> samples;

  void record(Opcode op, Status status, double latency_ns) { samples.push_back({op, status, latency_ns}); }
  /// Latencies of successful READ_LINE requests.
  std::vector<double> line_read_latencies() const;
};

struct BudgetReport {
  double p50_ns = 0.0;
  double p99_ns = 0.0;
  double p9999_ns = 0.0;
  double bandwidth_gbps = 0.0;
  std::uint64_t samples = 0;
  bool bandwidth_ok = false;
  bool access_ok = false;
  bool tail_ok = false;

  bool all_ok() const noexcept { return bandwidth_ok && access_ok && tail_ok; }
};

/// Nearest-rank percentile (q in (0, 1]) of `values`. Throws ArgumentError if empty.
double percentile(std::vector<double> values, double q);

/// Checks compressed-line read latencies against the access (p50) and tail
/// (p99.99) budgets and the modeled bandwidth against its floor. Throws
/// ArgumentError if `stats` has no successful line reads.
BudgetReport validate_budgets(const DeviceConfig& cfg, const ScenarioStats& stats);

/// CXL Type 3 expander with an in-line compressed tier.
///
/// Requests are processed one at a time. Every response carries the stages it
/// traversed; the functional result is exactly what TierStore returns.
/// A compaction triggered by a mutation is modeled as background work drained
/// one 4 KiB unit per subsequent request; each request that overlaps it pays a
/// compaction stall for that unit.
class Device {
public:
  explicit Device(const DeviceConfig& cfg);

  CxlResponse handle_request(const CxlRequest& req);

  /// Swaps configuration; returns the previous one. Throws ArgumentError for an
  /// invalid config, StateError while compaction work is outstanding or when
  /// changing capacity of a non-empty store.
  DeviceConfig configure(const DeviceConfig& cfg);

  const DeviceConfig& config() const noexcept { return cfg_; }
  const TierStore& store() const noexcept { return store_; }
  const ScenarioStats& stats() const noexcept { return stats_; }
  std::uint64_t pending_compaction_bytes() const noexcept { return pending_compaction_; }

  /// Reads a stored page without modeling a request (verification only).
  Page peek_page(PageId id) const { return store_.load_page(id); }

private:
  using Stages = std::vector<Stage>;

  void translate(PageId page, Stages& stages);
  void evict_translation(PageId page);
  void charge_compaction_stall(Stages& stages);
  void note_compaction(const std::optional<CompactionReport>& report, CxlResponse& resp, Stages& stages);
  void dispatch(const CxlRequest& req, CxlResponse& resp, Stages& stages);
  double transfer_ns(std::uint64_t bytes) const noexcept;
  double decompress_ns(std::uint64_t bytes) const noexcept;

  static StoreConfig store_config(const DeviceConfig& cfg);

  DeviceConfig cfg_;
  TierStore store_;
  ScenarioStats stats_;
  std::uint64_t pending_compaction_ = 0;
  std::list<PageId> lru_;
  std::unordered_map<PageId, std::list<PageId>::iterator> cached_;
};

} // namespace cxltier
