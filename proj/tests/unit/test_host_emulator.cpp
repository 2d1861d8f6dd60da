#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "cxltier/errors.hpp"
#include "cxltier/host_emulator.hpp"
#include "support/helpers.hpp"

using namespace cxltier;

namespace {

HostMemory memory_with(std::initializer_list<std::pair<PageId, std::uint64_t>> pages) {
  HostMemory m;
  m.direct_capacity_pages = 64;
  for (auto [id, ord] : pages) m.resident[id] = ResidentPage{Page{}, ord};
  return m;
}

DeviceConfig device(std::uint64_t capacity = 1 << 20) {
  DeviceConfig c;
  c.capacity_bytes = capacity;
  return c;
}

WorkloadSpec small_spec() {
  WorkloadSpec s;
  s.kind = WorkloadKind::Zipfian;
  s.page_count = 200;
  s.op_count = 4000;
  s.direct_capacity_pages = 80;
  s.zipf_s = 0.8;
  return s;
}

} // namespace

TEST_SUITE("host_emulator") {

TEST_CASE("detect_cold_pages examples") {
  const HostMemory m = memory_with({{1, 1}, {2, 2}, {3, 3}});
  CHECK(detect_cold_pages(m, 1) == std::vector<PageId>{1});
  CHECK(detect_cold_pages(m, 3) == std::vector<PageId>{1, 2, 3});
  const HostMemory tie = memory_with({{9, 5}, {4, 5}, {7, 6}});
  CHECK(detect_cold_pages(tie, 2) == std::vector<PageId>{4, 9});
  CHECK(detect_cold_pages(m, 0).empty());
  CHECK_THROWS_AS(detect_cold_pages(m, 4), ArgumentError);
}

TEST_CASE("detect_cold_pages matches brute force") {
  Xoshiro256 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    HostMemory m;
    const std::size_t n = 1 + rng.below(64);
    for (std::size_t i = 0; i < n; ++i) m.resident[rng.below(200)] = ResidentPage{Page{}, rng.below(20)};
    const std::size_t k = rng.below(m.resident.size() + 1);
    // Brute force: repeatedly pick the minimum remaining (ordinal, id).
    std::vector<PageId> want;
    std::set<PageId> taken;
    for (std::size_t j = 0; j < k; ++j) {
      std::optional<std::pair<std::uint64_t, PageId>> best;
      for (const auto& [id, p] : m.resident) {
        if (taken.contains(id)) continue;
        const std::pair<std::uint64_t, PageId> key{p.last_access, id};
        if (!best || key < *best) best = key;
      }
      taken.insert(best->second);
      want.push_back(best->second);
    }
    REQUIRE(detect_cold_pages(m, k) == want);
  }
}

TEST_CASE("demote and promote bookkeeping") {
  Host h(4, device());
  h.insert(1, Page{});
  h.insert(2, testing::seeded_page(2));
  const MigrationResult d = h.demote(1);
  CHECK(d.accepted);
  CHECK(d.physical_bytes == 128);
  CHECK(h.memory().demoted.size() == 1);
  CHECK(h.memory().resident.size() == 1);
  CHECK(h.demoted_page_ratios() == std::vector<double>{32.0});
  CHECK_THROWS_AS(h.demote(1), StateError);
  CHECK_THROWS_AS(h.demote(42), StateError);

  const std::uint64_t before = h.memory().clock;
  CHECK(h.promote(1).accepted);
  CHECK(h.memory().resident.at(1).content == Page{});
  CHECK(h.memory().resident.at(1).last_access == before + 1);
  CHECK(h.memory().demoted.empty());
  CHECK_FALSE(h.device().store().contains(1));
  CHECK_THROWS_AS(h.promote(1), StateError);
  CHECK_THROWS_AS(h.promote(99), StateError);
}

TEST_CASE("demotion into a full device is rejected and counted") {
  Host h(8, device(8 * 1024));
  h.insert(1, testing::seeded_page(1));
  h.insert(2, testing::seeded_page(2));
  h.insert(3, testing::seeded_page(3));
  std::size_t accepted = 0;
  for (PageId id : {1, 2, 3}) accepted += h.demote(id).accepted;
  CHECK(accepted < 3);
  CHECK(h.rejected_demotions() == 3 - accepted);
  CHECK(h.memory().resident.size() == 3 - accepted);
  CHECK(h.memory().demoted.size() == accepted);
}

TEST_CASE("promote into a full direct tier demotes exactly one page first") {
  Host h(3, device());
  for (PageId id = 1; id <= 3; ++id) h.insert(id, Page{});
  h.demote(2);
  h.insert(4, Page{});
  REQUIRE(h.memory().resident.size() == 3);
  const std::uint64_t demotions = h.demotions();
  h.promote(2);
  CHECK(h.demotions() == demotions + 1);
  CHECK(h.memory().demoted == std::set<PageId>{1});
  CHECK(h.memory().resident.size() == 3);
}

TEST_CASE("trace parsing") {
  SUBCASE("three ops in order") {
    const WorkloadSpec s = parse_trace("0,R,5,0\n1,WL,7,63\n2,RL,5,3\n");
    CHECK(s.kind == WorkloadKind::Trace);
    REQUIRE(s.trace.size() == 3);
    CHECK(s.trace[0] == TraceOp{0, AccessOp::R, 5, 0});
    CHECK(s.trace[1] == TraceOp{1, AccessOp::WL, 7, 63});
    CHECK(s.trace[2] == TraceOp{2, AccessOp::RL, 5, 3});
    CHECK(s.op_count == 3);
    CHECK(s.page_count == 2);
    CHECK_NOTHROW(s.validate());
  }
  SUBCASE("bad op names its line") {
    try {
      parse_trace("0,R,1,0\n1,X,1,0\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("comments, blanks and malformed fields") {
    CHECK(parse_trace("# header\n\n0,W,1,1\n").trace.size() == 1);
    CHECK_THROWS_AS(parse_trace("0,R,1\n"), ParseError);
    CHECK_THROWS_AS(parse_trace("0,R,1,64\n"), ParseError);
    CHECK_THROWS_AS(parse_trace("0,R,-1,0\n"), ParseError);
    CHECK_THROWS_AS(parse_trace("0,R,1,0,9\n"), ParseError);
  }
  SUBCASE("empty file is an empty valid trace") {
    const auto dir = testing::fresh_dir("trace_empty");
    std::ofstream(dir / "t.trace").close();
    const WorkloadSpec s = load_trace(dir / "t.trace");
    CHECK(s.trace.empty());
    CHECK_NOTHROW(s.validate());
    CHECK_THROWS_AS(load_trace(dir / "missing.trace"), std::runtime_error);
  }
}

TEST_CASE("synthetic op streams") {
  WorkloadSpec s = small_spec();
  const auto ops = generate_ops(s);
  CHECK(ops.size() == s.op_count);
  CHECK(ops == generate_ops(s));
  for (const TraceOp& op : ops) {
    CHECK(op.page < s.page_count);
    CHECK(op.line < 64);
  }
  s.kind = WorkloadKind::Sequential;
  const auto seq = generate_ops(s);
  CHECK(seq[0].page == 0);
  CHECK(seq[64].page == 1);
  CHECK(seq[65].line == 1);
  s.write_fraction = 1.5;
  CHECK_THROWS_AS(generate_ops(s), ArgumentError);
}

TEST_CASE("run_workload is deterministic") {
  const RunReport a = run_workload(small_spec(), device());
  const RunReport b = run_workload(small_spec(), device());
  CHECK(a.ops_executed == b.ops_executed);
  CHECK(a.demotions == b.demotions);
  CHECK(a.promotions == b.promotions);
  CHECK(a.geomean_compression_ratio == b.geomean_compression_ratio);
  CHECK(a.line_read_latency.p9999_ns == b.line_read_latency.p9999_ns);
  REQUIRE(a.telemetry.size() == b.telemetry.size());
  for (std::size_t i = 0; i < a.telemetry.size(); ++i) {
    CHECK(a.telemetry[i].physical_bytes == b.telemetry[i].physical_bytes);
    CHECK(a.telemetry[i].compression_ratio == b.telemetry[i].compression_ratio);
  }
  CHECK(a.verified);
  CHECK(a.shadow_mismatches == 0);
  CHECK(a.ops_executed == small_spec().op_count);
}

TEST_CASE("ZERO_HEAVY demotions compress at least 2x") {
  const RunReport r = run_workload(small_spec(), device());
  REQUIRE(r.geomean_compression_ratio.has_value());
  CHECK(*r.geomean_compression_ratio >= 2.0);
  CHECK(r.demotions >= 1);
  CHECK(r.promotions >= 1);
}

TEST_CASE("zero ops give an empty report") {
  WorkloadSpec s = small_spec();
  s.op_count = 0;
  const RunReport r = run_workload(s, device());
  CHECK(r.ops_executed == 0);
  CHECK(r.demotions == 0);
  CHECK_FALSE(r.geomean_compression_ratio.has_value());
  CHECK(r.verified);
}

TEST_CASE("block mode line writes fall back to promotion") {
  WorkloadSpec s = small_spec();
  s.write_fraction = 0.5;
  DeviceConfig c = device();
  c.mode = StorageMode::Block;
  const RunReport r = run_workload(s, c);
  CHECK(r.verified);
  CHECK(r.granularity_fallbacks > 0);
  CHECK(r.device_line_writes == 0);
}

TEST_CASE("every workload kind and profile verifies") {
  for (WorkloadKind k : {WorkloadKind::Uniform, WorkloadKind::Zipfian, WorkloadKind::Sequential}) {
    for (ContentProfile p : kAllProfiles) {
      WorkloadSpec s = small_spec();
      s.kind = k;
      s.op_count = 1500;
      s.content_profile = p;
      const RunReport r = run_workload(s, device(2 << 20));
      CAPTURE(workload_kind_name(k));
      CAPTURE(profile_name(p));
      CHECK(r.verified);
      CHECK(r.shadow_mismatches == 0);
    }
  }
}

TEST_CASE("working set that fits nowhere is a capacity error") {
  WorkloadSpec s = small_spec();
  s.content_profile = ContentProfile::Random;
  s.direct_capacity_pages = 4;
  CHECK_THROWS_AS(run_workload(s, device(64 * 1024)), CapacityExhausted);
}

}
