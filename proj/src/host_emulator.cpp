#include "cxltier/host_emulator.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "cxltier/errors.hpp"

namespace cxltier {

std::string_view workload_kind_name(WorkloadKind k) noexcept {
  switch (k) {
    case WorkloadKind::Uniform: return "UNIFORM";
    case WorkloadKind::Zipfian: return "ZIPFIAN";
    case WorkloadKind::Sequential: return "SEQUENTIAL";
    case WorkloadKind::Trace: return "TRACE";
  }
  return "?";
}

WorkloadKind workload_kind_from_name(std::string_view name) {
  std::string upper(name);
  std::ranges::transform(upper, upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (WorkloadKind k : {WorkloadKind::Uniform, WorkloadKind::Zipfian, WorkloadKind::Sequential, WorkloadKind::Trace}) {
    if (workload_kind_name(k) == upper) return k;
  }
  throw ArgumentError("unknown workload kind '" + std::string(name) + "'");
}

std::string_view access_op_name(AccessOp op) noexcept {
  switch (op) {
    case AccessOp::R: return "R";
    case AccessOp::W: return "W";
    case AccessOp::RL: return "RL";
    case AccessOp::WL: return "WL";
  }
  return "?";
}

void WorkloadSpec::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ArgumentError(std::string("invalid workload: ") + what);
  };
  require(write_fraction >= 0.0 && write_fraction <= 1.0, "write_fraction must be in [0, 1]");
  require(line_access_fraction >= 0.0 && line_access_fraction <= 1.0, "line_access_fraction must be in [0, 1]");
  require(page_count >= 1, "page_count must be >= 1");
  require(direct_capacity_pages >= 1, "direct_capacity_pages must be >= 1");
  if (kind == WorkloadKind::Zipfian) require(zipf_s > 0.0 && std::isfinite(zipf_s), "zipf_s must be > 0");
  if (kind == WorkloadKind::Trace) {
    require(op_count == trace.size(), "op_count must equal the trace length");
    for (const TraceOp& t : trace) require(t.line < kLinesPerPage, "trace line_index must be < 64");
  } else {
    require(trace.empty(), "trace ops given for a synthetic workload");
  }
}

// ---------------------------------------------------------------------------
// traces

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_u64(std::string_view field, const char* what, std::size_t line_no) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || end != field.data() + field.size()) {
    throw ParseError(std::string("bad ") + what + " '" + std::string(field) + "'", line_no);
  }
  return v;
}

} // namespace

WorkloadSpec parse_trace(std::string_view text) {
  WorkloadSpec spec;
  spec.kind = WorkloadKind::Trace;
  std::set<PageId> pages;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    std::array<std::string_view, 4> fields;
    std::size_t n = 0;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      if (n == fields.size()) throw ParseError("expected 4 comma-separated fields", line_no);
      fields[n++] = trim(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (n != fields.size()) throw ParseError("expected 4 comma-separated fields", line_no);

    TraceOp op;
    op.ordinal = parse_u64(fields[0], "ordinal", line_no);
    if (fields[1] == "R") op.op = AccessOp::R;
    else if (fields[1] == "W") op.op = AccessOp::W;
    else if (fields[1] == "RL") op.op = AccessOp::RL;
    else if (fields[1] == "WL") op.op = AccessOp::WL;
    else throw ParseError("bad op '" + std::string(fields[1]) + "' (expected R, W, RL or WL)", line_no);
    op.page = parse_u64(fields[2], "page_id", line_no);
    const std::uint64_t index = parse_u64(fields[3], "line_index", line_no);
    if (index >= kLinesPerPage) throw ParseError("line_index must be < 64", line_no);
    op.line = static_cast<std::uint8_t>(index);

    pages.insert(op.page);
    spec.trace.push_back(op);
  }
  spec.op_count = spec.trace.size();
  spec.page_count = std::max<std::uint64_t>(1, pages.size());
  return spec;
}

WorkloadSpec load_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace(buf.str());
}

std::vector<TraceOp> generate_ops(const WorkloadSpec& spec) {
  spec.validate();
  if (spec.kind == WorkloadKind::Trace) return spec.trace;

  std::vector<double> cdf;
  if (spec.kind == WorkloadKind::Zipfian) {
    cdf.resize(spec.page_count);
    double acc = 0.0;
    for (std::uint64_t k = 0; k < spec.page_count; ++k) {
      acc += 1.0 / std::pow(static_cast<double>(k + 1), spec.zipf_s);
      cdf[k] = acc;
    }
  }

  Xoshiro256 rng(mix_seed(spec.seed, 1));
  std::vector<TraceOp> ops;
  ops.reserve(spec.op_count);
  for (std::uint64_t i = 0; i < spec.op_count; ++i) {
    TraceOp op;
    op.ordinal = i;
    switch (spec.kind) {
      case WorkloadKind::Uniform: op.page = rng.below(spec.page_count); break;
      case WorkloadKind::Zipfian: {
        const double u = rng.uniform() * cdf.back();
        const auto it = std::ranges::upper_bound(cdf, u);
        op.page = std::min<std::uint64_t>(static_cast<std::uint64_t>(it - cdf.begin()), spec.page_count - 1);
        break;
      }
      case WorkloadKind::Sequential: op.page = (i / kLinesPerPage) % spec.page_count; break;
      case WorkloadKind::Trace: break;
    }
    const bool line_op = rng.chance(spec.line_access_fraction);
    const bool write = rng.chance(spec.write_fraction);
    const std::uint64_t line = rng.below(kLinesPerPage);
    op.line = static_cast<std::uint8_t>(spec.kind == WorkloadKind::Sequential ? i % kLinesPerPage : line);
    op.op = line_op ? (write ? AccessOp::WL : AccessOp::RL) : (write ? AccessOp::W : AccessOp::R);
    ops.push_back(op);
  }
  return ops;
}

// ---------------------------------------------------------------------------
// host tiers

std::vector<PageId> detect_cold_pages(const HostMemory& mem, std::size_t k) {
  if (k > mem.resident.size()) {
    throw ArgumentError("asked for " + std::to_string(k) + " cold pages, only " +
                        std::to_string(mem.resident.size()) + " resident");
  }
  std::vector<std::pair<std::uint64_t, PageId>> order;
  order.reserve(mem.resident.size());
  for (const auto& [id, page] : mem.resident) order.emplace_back(page.last_access, id);
  std::ranges::partial_sort(order, order.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<PageId> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(order[i].second);
  return out;
}

Host::Host(std::uint64_t direct_capacity_pages, const DeviceConfig& device) : device_(device) {
  if (direct_capacity_pages == 0) throw ArgumentError("direct tier needs at least one page");
  memory_.direct_capacity_pages = direct_capacity_pages;
}

MigrationResult Host::demote(PageId id) {
  auto it = memory_.resident.find(id);
  if (it == memory_.resident.end()) throw StateError("page " + std::to_string(id) + " is not resident");
  const CxlResponse resp = device_.handle_request(CxlRequest::migrate_in(id, it->second.content));
  if (resp.status == Status::CapacityExhausted) {
    ++rejected_;
    return {false, resp.latency_ns, 0};
  }
  if (resp.status != Status::Ok) throw StateError("demotion of page " + std::to_string(id) + ": " + resp.message);
  memory_.resident.erase(it);
  memory_.demoted.insert(id);
  ++demotions_;
  ratios_.push_back(static_cast<double>(kPageBytes) / static_cast<double>(resp.physical_bytes));
  return {true, resp.latency_ns, resp.physical_bytes};
}

void Host::make_room() {
  if (memory_.resident.size() < memory_.direct_capacity_pages) return;
  const PageId coldest = detect_cold_pages(memory_, 1).front();
  if (!demote(coldest).accepted) {
    throw CapacityExhausted("direct tier is full and the device rejected page " + std::to_string(coldest));
  }
}

MigrationResult Host::promote(PageId id) {
  if (!memory_.demoted.contains(id)) throw StateError("page " + std::to_string(id) + " is not demoted");
  make_room();
  const CxlResponse resp = device_.handle_request(CxlRequest::migrate_out(id));
  if (resp.status != Status::Ok) throw StateError("promotion of page " + std::to_string(id) + ": " + resp.message);
  ResidentPage page;
  std::memcpy(page.content.data(), resp.data.data(), kPageBytes);
  page.last_access = ++memory_.clock;
  memory_.demoted.erase(id);
  memory_.resident.emplace(id, page);
  ++promotions_;
  return {true, resp.latency_ns, resp.physical_bytes};
}

void Host::insert(PageId id, const Page& content) {
  if (memory_.resident.contains(id) || memory_.demoted.contains(id)) {
    throw StateError("page " + std::to_string(id) + " already exists");
  }
  make_room();
  memory_.resident.emplace(id, ResidentPage{content, ++memory_.clock});
}

void Host::write_line(PageId id, std::size_t line, const CacheLine& data) {
  ResidentPage& page = memory_.resident.at(id);
  std::memcpy(page.content.data() + line * kLineBytes, data.data(), kLineBytes);
  page.last_access = ++memory_.clock;
}

// ---------------------------------------------------------------------------
// workload driver

namespace {

LatencySummary summarize(std::vector<double> values) {
  LatencySummary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.p50_ns = percentile(values, 0.50);
  s.p99_ns = percentile(values, 0.99);
  s.p9999_ns = percentile(values, 0.9999);
  s.max_ns = *std::ranges::max_element(values);
  return s;
}

bool line_matches(const Page& page, std::size_t line, std::span<const std::uint8_t> data) {
  return data.size() == kLineBytes && std::memcmp(page.data() + line * kLineBytes, data.data(), kLineBytes) == 0;
}

} // namespace

SimulationResult simulate(const WorkloadSpec& spec, const DeviceConfig& device) {
  spec.validate();
  device.validate();
  const std::vector<TraceOp> ops = generate_ops(spec);

  Host host(spec.direct_capacity_pages, device);
  std::map<PageId, Page> shadow;
  Xoshiro256 write_rng(mix_seed(spec.seed, 2));
  RunReport report;

  const std::uint64_t cap = spec.direct_capacity_pages;
  const std::uint64_t batch = std::max<std::uint64_t>(1, cap / 10);
  const std::uint64_t interval =
      spec.telemetry_interval ? spec.telemetry_interval : std::max<std::uint64_t>(1, spec.op_count / 50);

  auto sample = [&](std::uint64_t ordinal) {
    const CxlResponse resp = host.device().handle_request(CxlRequest::telemetry());
    const TierTelemetry& t = *resp.telemetry;
    report.telemetry.push_back({ordinal, t.logical_bytes, t.physical_bytes, t.compression_ratio,
                                host.memory().resident.size(), host.memory().demoted.size()});
  };
  auto check = [&](bool ok) {
    ++report.shadow_checks;
    if (!ok) ++report.shadow_mismatches;
  };

  sample(0);
  for (std::uint64_t i = 0; i < ops.size(); ++i) {
    const TraceOp& op = ops[i];
    const HostMemory& mem = host.memory();

    if (!shadow.contains(op.page)) {
      Xoshiro256 page_rng(mix_seed(spec.seed, 3, op.page));
      const Page content = generate_page(spec.content_profile, page_rng);
      shadow[op.page] = content;
      host.insert(op.page, content);
    }
    Page& truth = shadow[op.page];
    const bool write = op.op == AccessOp::W || op.op == AccessOp::WL;
    const CacheLine fresh = write ? generate_line(spec.content_profile, write_rng) : CacheLine{};

    if (mem.demoted.contains(op.page)) {
      if (op.op == AccessOp::RL) {
        const CxlResponse resp = host.device().handle_request(CxlRequest::read_line(op.page, op.line));
        ++report.device_line_reads;
        check(resp.status == Status::Ok && line_matches(truth, op.line, resp.data));
        ++report.ops_executed;
      } else if (op.op == AccessOp::WL) {
        const CxlResponse resp = host.device().handle_request(CxlRequest::write_line(op.page, op.line, fresh));
        if (resp.status == Status::Ok) {
          ++report.device_line_writes;
          std::memcpy(truth.data() + op.line * kLineBytes, fresh.data(), kLineBytes);
          ++report.ops_executed;
        } else if (resp.status == Status::UnsupportedGranularity || resp.status == Status::CapacityExhausted) {
          ++report.granularity_fallbacks;
          host.promote(op.page);
        } else {
          throw StateError("line write to page " + std::to_string(op.page) + ": " + resp.message);
        }
      } else {
        host.promote(op.page);
      }
    }

    if (mem.resident.contains(op.page)) {
      if (write) {
        host.write_line(op.page, op.line, fresh);
        std::memcpy(truth.data() + op.line * kLineBytes, fresh.data(), kLineBytes);
      } else {
        host.touch(op.page);
        check(mem.resident.at(op.page).content == truth);
      }
      ++report.ops_executed;
    }

    if (mem.resident.size() * 10 > cap * 9) {
      const auto cold = detect_cold_pages(mem, std::min<std::size_t>(batch, mem.resident.size()));
      for (PageId id : cold) {
        if (!host.demote(id).accepted) break;
      }
    }
    if ((i + 1) % interval == 0) sample(i + 1);
  }
  if (report.telemetry.back().ordinal != ops.size()) sample(ops.size());

  bool ok = report.shadow_mismatches == 0;
  const HostMemory& mem = host.memory();
  for (const auto& [id, content] : shadow) {
    const bool resident = mem.resident.contains(id);
    const bool demoted = mem.demoted.contains(id);
    if (resident == demoted) {
      ok = false;
      continue;
    }
    const Page seen = resident ? mem.resident.at(id).content : host.device().peek_page(id);
    ok = ok && seen == content;
  }
  try {
    host.device().store().audit();
  } catch (const std::logic_error&) {
    ok = false;
  }
  report.verified = ok;

  report.demotions = host.demotions();
  report.promotions = host.promotions();
  report.rejected_demotions = host.rejected_demotions();
  if (!host.demoted_page_ratios().empty()) {
    double log_sum = 0.0;
    for (double r : host.demoted_page_ratios()) log_sum += std::log(r);
    report.geomean_compression_ratio = std::exp(log_sum / static_cast<double>(host.demoted_page_ratios().size()));
  }

  const ScenarioStats& stats = host.device().stats();
  report.line_read_latency = summarize(stats.line_read_latencies());
  std::vector<double> all;
  all.reserve(stats.samples.size());
  for (const RequestSample& s : stats.samples) all.push_back(s.latency_ns);
  report.request_latency = summarize(std::move(all));
  report.final_telemetry = host.device().store().telemetry();
  return {std::move(report), stats};
}

} // namespace cxltier
