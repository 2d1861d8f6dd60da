// Command-line front end: corpus benchmarking, scenario simulation, budget
// validation and TCO reporting.
//
// Exit codes: 0 success, 1 usage/parse/runtime error, 2 budget violation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cxltier/bench.hpp"
#include "cxltier/config_io.hpp"
#include "cxltier/corpus.hpp"
#include "cxltier/errors.hpp"

namespace fs = std::filesystem;
using namespace cxltier;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBudget = 2;

struct Common {
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "text";
};

struct Overrides {
  std::string mode;
  std::optional<std::uint32_t> page_size;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Directory for report files");
  cmd->add_option("--seed", c.seed, "Override the workload seed");
  cmd->add_option("--format", c.format, "Standard output format")->check(CLI::IsMember({"text", "csv"}));
}

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--mode", o.mode, "Storage granularity")->check(CLI::IsMember({"cacheline", "block"}));
  cmd->add_option("--page-size", o.page_size, "Block size in block mode")->check(CLI::IsMember({1024, 4096}));
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("error writing " + path.string());
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

ScenarioConfig scenario_with_overrides(const std::string& path, const Common& c, const Overrides& o) {
  ScenarioConfig s = load_scenario(path);
  if (c.seed) s.workload.seed = *c.seed;
  if (!o.mode.empty()) s.device.mode = mode_from_name(o.mode);
  if (o.page_size) s.device.block_size = *o.page_size;
  return s;
}

void print_budgets(const BudgetReport& b) {
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  std::cout << "access    p50    " << fmt("%9.3f", b.p50_ns) << " ns   <= " << kAccessBudgetNs << " ns   "
            << verdict(b.access_ok) << "\n";
  std::cout << "tail      p99.99 " << fmt("%9.3f", b.p9999_ns) << " ns   <= " << kTailBudgetNs << " ns  "
            << verdict(b.tail_ok) << "\n";
  std::cout << "bandwidth        " << fmt("%9.3f", b.bandwidth_gbps) << " GB/s >= " << kBandwidthBudgetGBps
            << " GB/s  " << verdict(b.bandwidth_ok) << "\n";
  const int passed = int{b.access_ok} + int{b.tail_ok} + int{b.bandwidth_ok};
  std::cout << passed << "/3 budgets met over " << b.samples << " compressed-line reads\n";
}

int cmd_bench(const std::string& corpus, const Common& c, const Overrides& o) {
  const StorageMode mode = o.mode.empty() ? StorageMode::Cacheline : mode_from_name(o.mode);
  const CorpusReport report = bench_compress(corpus, o.page_size.value_or(4096), mode);
  if (!c.out.empty()) {
    write_file(fs::path(c.out) / "corpus_report.json", dump(to_json(report)));
    write_file(fs::path(c.out) / "corpus_report.csv", corpus_csv(report));
  }
  std::cout << (c.format == "csv" ? corpus_csv(report) : dump(to_json(report)));
  return kExitOk;
}

int cmd_simulate(const std::string& path, const Common& c, const Overrides& o) {
  const ScenarioConfig s = scenario_with_overrides(path, c, o);
  const SimulationResult result = simulate(s.workload, s.device);
  const BudgetReport budgets = validate_budgets(s.device, result.stats);
  const RunReport& r = result.report;

  const fs::path dir = c.out.empty() ? s.output.dir : fs::path(c.out);
  if (s.wants(ReportFormat::Text)) {
    write_file(dir / s.output.run_report, dump(to_json(r)));
    write_file(dir / s.output.budget_report, dump(to_json(budgets)));
  }
  if (s.wants(ReportFormat::Csv)) write_file(dir / s.output.telemetry_csv, telemetry_csv(r.telemetry));

  if (c.format == "csv") {
    std::cout << telemetry_csv(r.telemetry);
  } else {
    std::cout << "ops_executed " << r.ops_executed << "\n"
              << "demotions " << r.demotions << "\n"
              << "promotions " << r.promotions << "\n"
              << "rejected_demotions " << r.rejected_demotions << "\n"
              << "geomean_compression_ratio "
              << (r.geomean_compression_ratio ? fmt("%.4f", *r.geomean_compression_ratio) : std::string("n/a"))
              << "\n"
              << "telemetry_samples " << r.telemetry.size() << "\n"
              << "verified " << (r.verified ? "true" : "false") << "\n";
    print_budgets(budgets);
  }
  if (!r.verified) {
    std::cerr << "error: tiered contents diverged from the shadow copy\n";
    return kExitError;
  }
  return budgets.all_ok() ? kExitOk : kExitBudget;
}

int cmd_validate(const std::string& path, const Common& c, const Overrides& o) {
  const ScenarioConfig s = scenario_with_overrides(path, c, o);
  const SimulationResult result = simulate(s.workload, s.device);
  const BudgetReport budgets = validate_budgets(s.device, result.stats);
  if (!c.out.empty()) write_file(fs::path(c.out) / s.output.budget_report, dump(to_json(budgets)));
  if (c.format == "csv") {
    std::cout << "check,value,limit,ok\n"
              << "access_p50_ns," << fmt("%.3f", budgets.p50_ns) << ',' << kAccessBudgetNs << ','
              << budgets.access_ok << "\n"
              << "tail_p9999_ns," << fmt("%.3f", budgets.p9999_ns) << ',' << kTailBudgetNs << ','
              << budgets.tail_ok << "\n"
              << "bandwidth_gbps," << fmt("%.3f", budgets.bandwidth_gbps) << ',' << kBandwidthBudgetGBps << ','
              << budgets.bandwidth_ok << "\n";
  } else {
    print_budgets(budgets);
  }
  return budgets.all_ok() ? kExitOk : kExitBudget;
}

int cmd_tco(const std::string& path, std::vector<double> ratios, const Common& c) {
  const TcoParams params = path.empty() ? TcoParams{} : load_tco_params(path);
  const TcoReport at_param = compute_tco(params);
  if (ratios.empty()) ratios = {1.0, 1.5, 2.0, 2.5, 3.0};
  const std::vector<TcoReport> curve = sweep(params, ratios);

  Json sweep_json = Json::array();
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    Json row = to_json(curve[i]);
    row["compression_ratio"] = ratios[i];
    sweep_json.push_back(std::move(row));
  }
  const Json report = {{"params", to_json(params)}, {"report", to_json(at_param)}, {"sweep", std::move(sweep_json)}};
  if (!c.out.empty()) {
    write_file(fs::path(c.out) / "tco_report.json", dump(report));
    write_file(fs::path(c.out) / "tco_sweep.csv", tco_csv(ratios, curve));
  }
  if (c.format == "csv") {
    std::cout << tco_csv(ratios, curve);
  } else {
    for (std::size_t i = 0; i < ratios.size(); ++i) {
      std::cout << "ratio " << fmt("%.3f", ratios[i]) << "  savings " << fmt("%.2f", 100.0 * curve[i].savings_fraction)
                << "%  $/GB " << fmt("%.4f", curve[i].compressed_cost_per_gb) << "\n";
    }
  }
  return kExitOk;
}

int cmd_gen_corpus(const std::vector<std::string>& profiles, std::size_t pages, const Common& c) {
  if (c.out.empty()) throw ArgumentError("gen-corpus needs --out");
  if (pages == 0) throw ArgumentError("--pages must be >= 1");
  const std::uint64_t seed = c.seed.value_or(42);
  for (const std::string& name : profiles) {
    const ContentProfile p = profile_from_name(name);
    const auto data = generate_corpus(p, pages, mix_seed(seed, static_cast<std::uint64_t>(p)));
    std::string file(profile_name(p));
    for (char& ch : file) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    const fs::path path = fs::path(c.out) / (file + ".bin");
    write_file(path, std::string(data.begin(), data.end()));
    std::cout << path.string() << " " << data.size() << "\n";
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed CXL memory tier: codec benchmark, simulator, budget check and TCO model"};
  app.require_subcommand(1);

  Common common;
  Overrides overrides;
  std::string path;
  std::vector<double> ratios;
  std::vector<std::string> profiles = {"ZERO_HEAVY", "INTEGER", "TEXTLIKE"};
  std::size_t pages = 256;

  auto* bench = app.add_subcommand("bench-compress", "Compression ratio of each file in a corpus directory");
  bench->add_option("corpus", path, "Directory of raw memory dumps")->required();
  add_common(bench, common);
  add_overrides(bench, overrides);

  auto* sim = app.add_subcommand("simulate", "Run a scenario and write run, telemetry and budget reports");
  sim->add_option("scenario", path, "Scenario JSON file")->required();
  add_common(sim, common);
  add_overrides(sim, overrides);

  auto* tco = app.add_subcommand("tco", "Cost per GB and savings across compression ratios");
  tco->add_option("params", path, "TCO parameter JSON file (defaults if omitted)");
  tco->add_option("--ratios", ratios, "Compression ratios to sweep")->delimiter(',');
  add_common(tco, common);

  auto* validate = app.add_subcommand("validate-budgets", "Check a scenario against the latency and bandwidth budgets");
  validate->add_option("scenario", path, "Scenario JSON file")->required();
  add_common(validate, common);
  add_overrides(validate, overrides);

  auto* gen = app.add_subcommand("gen-corpus", "Write synthetic memory dumps for bench-compress");
  gen->add_option("--profile", profiles, "Content profiles (ZERO_HEAVY, INTEGER, TEXTLIKE, RANDOM)");
  gen->add_option("--pages", pages, "Pages per file");
  add_common(gen, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*bench) return cmd_bench(path, common, overrides);
    if (*sim) return cmd_simulate(path, common, overrides);
    if (*tco) return cmd_tco(path, ratios, common);
    if (*validate) return cmd_validate(path, common, overrides);
    if (*gen) return cmd_gen_corpus(profiles, pages, common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
