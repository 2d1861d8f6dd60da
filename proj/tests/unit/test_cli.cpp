#include <doctest.h>

#include <fstream>

#include "cxltier/config_io.hpp"
#include "support/helpers.hpp"

namespace fs = std::filesystem;

namespace {

std::string src(const char* rel) { return "'" + (fs::path(CXLTIER_SOURCE_DIR) / rel).string() + "'"; }
std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

} // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate exit codes") {
  const auto out = testing::fresh_dir("cli_sim");
  CHECK(testing::run_cli("simulate " + src("configs/default_scenario.json") + " --out " + q(out)) == 0);
  CHECK(fs::exists(out / "run_report.json"));
  CHECK(fs::exists(out / "telemetry.csv"));
  CHECK(fs::exists(out / "budget_report.json"));
  const auto budget = cxltier::parse_json(testing::slurp(out / "budget_report.json"));
  CHECK(budget["tail_ok"] == true);

  const auto slow = testing::fresh_dir("cli_slow");
  CHECK(testing::run_cli("simulate " + src("configs/examples/slow_translation.json") + " --out " + q(slow)) == 2);
  CHECK(cxltier::parse_json(testing::slurp(slow / "budget_report.json"))["tail_ok"] == false);

  CHECK(testing::run_cli("simulate /nonexistent/scenario.json") == 1);
}

TEST_CASE("validate-budgets") {
  std::string text;
  CHECK(testing::run_cli("validate-budgets " + src("configs/default_scenario.json"), &text) == 0);
  CHECK(text.find("3/3 budgets met") != std::string::npos);

  const auto dir = testing::fresh_dir("cli_bw");
  auto j = cxltier::read_json_file(fs::path(CXLTIER_SOURCE_DIR) / "configs/default_scenario.json");
  j["device"]["engine_bytes_per_cycle"] = 32;
  j["workload"]["op_count"] = 2000;
  std::ofstream(dir / "narrow.json") << cxltier::dump(j);
  CHECK(testing::run_cli("validate-budgets " + q(dir / "narrow.json"), &text) != 0);
  CHECK(text.find("bandwidth") != std::string::npos);

  j["device"]["engine_bytes_per_cycle"] = 64;
  j["workload"]["op_count"] = 0;
  std::ofstream(dir / "empty.json") << cxltier::dump(j);
  CHECK(testing::run_cli("validate-budgets " + q(dir / "empty.json")) == 1);
}

TEST_CASE("tco") {
  std::string text;
  CHECK(testing::run_cli("tco " + src("configs/tco_default.json") + " --ratios 1,2 --format csv", &text) == 0);
  CHECK(text == "ratio,savings_fraction\n1.000000,0.000000\n2.000000,0.214286\n");
  CHECK(testing::run_cli("tco --ratios=-1") == 1);
  CHECK(testing::run_cli("tco --ratios 0.5") == 1);
}

TEST_CASE("usage errors") {
  CHECK(testing::run_cli("") == 1);
  CHECK(testing::run_cli("frobnicate") == 1);
  CHECK(testing::run_cli("bench-compress /nonexistent/corpus") == 1);
  CHECK(testing::run_cli("simulate " + src("configs/default_scenario.json") + " --page-size 2048") == 1);
  CHECK(testing::run_cli("--help") == 0);
}

TEST_CASE("repeated invocations write identical reports") {
  const auto a = testing::fresh_dir("cli_det_a");
  const auto b = testing::fresh_dir("cli_det_b");
  for (const auto& dir : {a, b}) {
    REQUIRE(testing::run_cli("simulate " + src("configs/scenarios/uniform_integer.json") + " --seed 7 --out " +
                             q(dir)) == 0);
    REQUIRE(testing::run_cli("gen-corpus --pages 16 --out " + q(dir / "corpus")) == 0);
    REQUIRE(testing::run_cli("bench-compress " + q(dir / "corpus") + " --out " + q(dir)) == 0);
    REQUIRE(testing::run_cli("tco --out " + q(dir)) == 0);
  }
  for (const char* name : {"run_report.json", "telemetry.csv", "budget_report.json", "corpus_report.json",
                           "corpus_report.csv", "tco_report.json", "tco_sweep.csv", "corpus/integer.bin"}) {
    CAPTURE(name);
    CHECK(testing::slurp(a / name) == testing::slurp(b / name));
    CHECK_FALSE(testing::slurp(a / name).empty());
  }
}

}
