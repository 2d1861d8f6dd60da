#include "cxltier/device_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "cxltier/errors.hpp"
#include "cxltier/lz4_block.hpp"

namespace cxltier {

void DeviceConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ArgumentError(std::string("invalid device config: ") + what);
  };
  require(capacity_bytes > 0 && capacity_bytes % kSectorBytes == 0,
          "capacity_bytes must be a positive multiple of 4096");
  require(channels >= 1, "channels must be >= 1");
  require(transfer_rate_mtps > 0.0, "transfer_rate_mtps must be > 0");
  require(decompress_engines >= 1, "decompress_engines must be >= 1");
  require(engine_bytes_per_cycle > 0.0, "engine_bytes_per_cycle must be > 0");
  require(clock_ghz > 0.0, "clock_ghz must be > 0");
  require(translation_cache_entries >= 1, "translation_cache_entries must be >= 1");
  require(valid_block_size(block_size), "block_size must be 1024 or 4096");
  require(compaction_trigger > 0.0 && compaction_trigger <= 1.0, "compaction_trigger must be in (0, 1]");
  const LatencyModel& l = latency;
  for (double v : {l.link_ns, l.translation_hit_ns, l.translation_miss_ns, l.dram_access_ns,
                   l.decompress_per_line_ns, l.compress_per_line_ns, l.relocation_stall_ns,
                   l.compaction_stall_ns_per_kb, l.power_state_ns}) {
    require(v >= 0.0 && std::isfinite(v), "latency stage costs must be finite and >= 0");
  }
}

double modeled_decompress_bandwidth(const DeviceConfig& cfg) noexcept {
  return static_cast<double>(cfg.decompress_engines) * cfg.engine_bytes_per_cycle * cfg.clock_ghz;
}

double channel_bandwidth(const DeviceConfig& cfg) noexcept {
  return static_cast<double>(cfg.channels) * cfg.transfer_rate_mtps * 8.0 / 1000.0;
}

std::string_view opcode_name(Opcode op) noexcept {
  switch (op) {
    case Opcode::ReadLine: return "READ_LINE";
    case Opcode::WriteLine: return "WRITE_LINE";
    case Opcode::MigratePageIn: return "MIGRATE_PAGE_IN";
    case Opcode::MigratePageOut: return "MIGRATE_PAGE_OUT";
    case Opcode::Config: return "CONFIG";
    case Opcode::Telemetry: return "TELEMETRY";
  }
  return "?";
}

std::string_view status_name(Status s) noexcept {
  switch (s) {
    case Status::Ok: return "OK";
    case Status::NotFound: return "NOT_FOUND";
    case Status::StateError: return "STATE_ERROR";
    case Status::ArgumentError: return "ARGUMENT_ERROR";
    case Status::CapacityExhausted: return "CAPACITY_EXHAUSTED";
    case Status::UnsupportedGranularity: return "UNSUPPORTED_GRANULARITY";
    case Status::FormatError: return "FORMAT_ERROR";
  }
  return "?";
}

std::vector<double> ScenarioStats::line_read_latencies() const {
  std::vector<double> out;
  for (const RequestSample& s : samples) {
    if (s.op == Opcode::ReadLine && s.status == Status::Ok) out.push_back(s.latency_ns);
  }
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw ArgumentError("percentile of an empty sample");
  std::ranges::sort(values);
  const auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

BudgetReport validate_budgets(const DeviceConfig& cfg, const ScenarioStats& stats) {
  const std::vector<double> reads = stats.line_read_latencies();
  if (reads.empty()) throw ArgumentError("scenario produced no completed compressed-line reads");
  BudgetReport r;
  r.samples = reads.size();
  r.p50_ns = percentile(reads, 0.50);
  r.p99_ns = percentile(reads, 0.99);
  r.p9999_ns = percentile(reads, 0.9999);
  r.bandwidth_gbps = modeled_decompress_bandwidth(cfg);
  r.access_ok = r.p50_ns <= kAccessBudgetNs;
  r.tail_ok = r.p9999_ns <= kTailBudgetNs;
  r.bandwidth_ok = r.bandwidth_gbps >= kBandwidthBudgetGBps;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t stored_bytes(const PageRecord& rec) {
  std::uint64_t n = 0;
  if (const auto* table = std::get_if<LineTable>(&rec.layout)) {
    for (const LineDescriptor& d : *table) n += d.size_class;
  } else {
    for (const BlockDescriptor& b : std::get<BlockList>(rec.layout)) n += b.compressed_len;
  }
  return n;
}

} // namespace

StoreConfig Device::store_config(const DeviceConfig& cfg) {
  return StoreConfig{cfg.capacity_bytes, cfg.block_size, cfg.compaction_trigger,
                     cfg.latency.compaction_stall_ns_per_kb};
}

Device::Device(const DeviceConfig& cfg) : cfg_((cfg.validate(), cfg)), store_(store_config(cfg)) {}

DeviceConfig Device::configure(const DeviceConfig& cfg) {
  cfg.validate();
  if (pending_compaction_ > 0) throw StateError("configuration change while compaction is in flight");
  store_.reconfigure(store_config(cfg));
  DeviceConfig previous = cfg_;
  cfg_ = cfg;
  while (lru_.size() > cfg_.translation_cache_entries) {
    cached_.erase(lru_.back());
    lru_.pop_back();
  }
  return previous;
}

double Device::transfer_ns(std::uint64_t bytes) const noexcept {
  return static_cast<double>(bytes) / channel_bandwidth(cfg_);
}

double Device::decompress_ns(std::uint64_t bytes) const noexcept {
  return static_cast<double>(bytes) / modeled_decompress_bandwidth(cfg_);
}

void Device::translate(PageId page, Stages& stages) {
  if (auto it = cached_.find(page); it != cached_.end()) {
    lru_.splice(lru_.begin(), lru_, it->second);
    stages.push_back({"translation_hit", cfg_.latency.translation_hit_ns});
    return;
  }
  stages.push_back({"translation_miss", cfg_.latency.translation_miss_ns});
  if (!store_.contains(page)) return;
  lru_.push_front(page);
  cached_[page] = lru_.begin();
  if (lru_.size() > cfg_.translation_cache_entries) {
    cached_.erase(lru_.back());
    lru_.pop_back();
  }
}

void Device::evict_translation(PageId page) {
  if (auto it = cached_.find(page); it != cached_.end()) {
    lru_.erase(it->second);
    cached_.erase(it);
  }
}

void Device::charge_compaction_stall(Stages& stages) {
  if (pending_compaction_ == 0) return;
  const std::uint64_t unit = std::min<std::uint64_t>(pending_compaction_, kSectorBytes);
  pending_compaction_ -= unit;
  stages.push_back(
      {"compaction_stall", static_cast<double>(unit) / 1024.0 * cfg_.latency.compaction_stall_ns_per_kb});
}

void Device::note_compaction(const std::optional<CompactionReport>& report, CxlResponse& resp,
                             Stages& stages) {
  if (!report) return;
  resp.compaction = true;
  pending_compaction_ += report->bytes_moved;
  charge_compaction_stall(stages);
}

void Device::dispatch(const CxlRequest& req, CxlResponse& resp, Stages& stages) {
  const LatencyModel& lat = cfg_.latency;
  switch (req.op) {
    case Opcode::ReadLine: {
      if (lat.power_state_ns > 0.0) stages.push_back({"power_state", lat.power_state_ns});
      translate(req.page, stages);
      const PageRecord* rec = store_.find(req.page);
      if (rec == nullptr) throw NotFoundError("page " + std::to_string(req.page) + " is not stored");
      if (req.line >= kLinesPerPage) throw ArgumentError("line index out of range");
      charge_compaction_stall(stages);
      if (const auto* table = std::get_if<LineTable>(&rec->layout)) {
        const CacheLine line = store_.read_line(req.page, req.line);
        if ((*table)[req.line].size_class > 0) {
          stages.push_back({"dram_access", lat.dram_access_ns});
          stages.push_back({"decompress", lat.decompress_per_line_ns});
        }
        resp.data.assign(line.begin(), line.end());
      } else {
        // Line access to a block page: fetch and decompress the enclosing block.
        const Page page = store_.load_page(req.page);
        const auto& blocks = std::get<BlockList>(rec->layout);
        const BlockDescriptor& b = blocks[req.line * kLineBytes / cfg_.block_size % blocks.size()];
        stages.push_back({"dram_access", lat.dram_access_ns});
        stages.push_back({"transfer", transfer_ns(b.compressed_len)});
        stages.push_back({"decompress", decompress_ns(b.logical_len)});
        resp.data.assign(page.begin() + req.line * kLineBytes, page.begin() + (req.line + 1) * kLineBytes);
      }
      break;
    }
    case Opcode::WriteLine: {
      if (req.data.size() != kLineBytes) throw ArgumentError("WRITE_LINE needs 64 bytes of data");
      if (lat.power_state_ns > 0.0) stages.push_back({"power_state", lat.power_state_ns});
      translate(req.page, stages);
      charge_compaction_stall(stages);
      CacheLine line;
      std::memcpy(line.data(), req.data.data(), kLineBytes);
      const WriteOutcome out = store_.write_line(req.page, req.line, line);
      stages.push_back({"compress", lat.compress_per_line_ns});
      if (out.size_class > 0) stages.push_back({"dram_access", lat.dram_access_ns});
      if (out.relocated) stages.push_back({"relocation_stall", lat.relocation_stall_ns});
      resp.relocated = out.relocated;
      note_compaction(out.compaction, resp, stages);
      break;
    }
    case Opcode::MigratePageIn: {
      if (req.data.size() != kPageBytes) throw ArgumentError("MIGRATE_PAGE_IN needs 4096 bytes of data");
      charge_compaction_stall(stages);
      const StoreReceipt receipt = store_.store_page(req.page, req.data, cfg_.mode);
      stages.push_back({"compress", lat.compress_per_line_ns * kLinesPerPage});
      // Writes the translation table; the cache is filled on first access.
      stages.push_back({"translation_update", lat.translation_hit_ns});
      stages.push_back({"dram_access", lat.dram_access_ns});
      stages.push_back({"transfer", transfer_ns(stored_bytes(*store_.find(req.page)))});
      resp.physical_bytes = receipt.physical_bytes_used;
      note_compaction(receipt.compaction, resp, stages);
      break;
    }
    case Opcode::MigratePageOut: {
      translate(req.page, stages);
      const PageRecord* rec = store_.find(req.page);
      if (rec == nullptr) throw NotFoundError("page " + std::to_string(req.page) + " is not stored");
      charge_compaction_stall(stages);
      const std::uint64_t bytes = stored_bytes(*rec);
      const Page page = store_.load_page(req.page);
      stages.push_back({"dram_access", lat.dram_access_ns});
      stages.push_back({"transfer", transfer_ns(bytes)});
      stages.push_back({"decompress", decompress_ns(kPageBytes)});
      const FreeReceipt freed = store_.free_page(req.page);
      evict_translation(req.page);
      resp.data.assign(page.begin(), page.end());
      resp.physical_bytes = freed.freed_physical_bytes;
      note_compaction(freed.compaction, resp, stages);
      break;
    }
    case Opcode::Config: {
      stages.push_back({"config_write", lat.translation_hit_ns});
      if (!req.config) throw ArgumentError("CONFIG request without a configuration");
      configure(*req.config);
      break;
    }
    case Opcode::Telemetry: {
      stages.push_back({"metadata_read", lat.translation_hit_ns});
      resp.telemetry = store_.telemetry();
      break;
    }
  }
}

CxlResponse Device::handle_request(const CxlRequest& req) {
  CxlResponse resp;
  Stages stages;
  // Link costs are read before dispatch so a CONFIG that changes them is
  // charged at the rates in force when it arrived.
  const double link = cfg_.latency.link_ns;
  stages.push_back({"link_in", link});
  try {
    dispatch(req, resp, stages);
  } catch (const NotFoundError& e) {
    resp.status = Status::NotFound;
    resp.message = e.what();
  } catch (const StateError& e) {
    resp.status = Status::StateError;
    resp.message = e.what();
  } catch (const ArgumentError& e) {
    resp.status = Status::ArgumentError;
    resp.message = e.what();
  } catch (const CapacityExhausted& e) {
    resp.status = Status::CapacityExhausted;
    resp.message = e.what();
  } catch (const UnsupportedGranularity& e) {
    resp.status = Status::UnsupportedGranularity;
    resp.message = e.what();
  } catch (const FormatError& e) {
    resp.status = Status::FormatError;
    resp.message = e.what();
  }
  if (resp.status != Status::Ok) resp.data.clear();
  stages.push_back({"link_out", link});

  double total = 0.0;
  for (const Stage& s : stages) total += s.ns;
  resp.latency_ns = total;
  resp.stages = std::move(stages);
  stats_.record(req.op, resp.status, resp.latency_ns);
  return resp;
}

} // namespace cxltier
