// relugf: run gradient-flow experiments, print risk ladders, run property sweeps.
//
// Exit codes: 0 pass, 1 check failure, 2 usage or config error, 3 numeric failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "relugf/config.hpp"
#include "relugf/experiment.hpp"
#include "relugf/theory.hpp"
#include "relugf/verify.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kNumeric = 3;

int cmd_simulate(const std::string& config_path, const std::string& out_override) {
  relugf::ExperimentConfig cfg;
  try {
    cfg = relugf::load_config(config_path);
  } catch (const relugf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  }
  if (!out_override.empty()) cfg.output_dir = out_override;
  try {
    const relugf::SimulationResult res = relugf::run_simulation(cfg);
    relugf::write_outputs(cfg, res, cfg.output_dir);
    std::cout << relugf::format_summary(cfg, res);
    return res.all_pass() ? kPass : kCheckFailed;
  } catch (const relugf::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kNumeric;
  }
}

// Re-runs one random-init config over seeds 0..n-1, one output directory each.
int cmd_sweep(const std::string& config_path, std::size_t n_seeds, const std::string& out_root, unsigned workers) {
  relugf::ExperimentConfig base;
  try {
    base = relugf::load_config(config_path);
  } catch (const relugf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  }
  if (base.init_theta) {
    std::cerr << "config error: init: sweep needs init.random\n";
    return kUsage;
  }
  struct Row {
    int status = kPass;
    std::string rung;
    double terminal = 0.0;
  };
  std::vector<Row> rows(n_seeds);
  auto run = [&](std::size_t seed) {
    relugf::ExperimentConfig cfg = base;
    cfg.init_random.seed = seed;
    const std::string dir = (std::filesystem::path(out_root) / ("seed_" + std::to_string(seed))).string();
    try {
      const relugf::SimulationResult res = relugf::run_simulation(cfg);
      relugf::write_outputs(cfg, res, dir);
      rows[seed] = {res.all_pass() ? kPass : kCheckFailed, res.rung, res.trajectory.risk.back()};
    } catch (const relugf::SolverError&) {
      rows[seed].status = kNumeric;
    }
  };
  workers = std::max(1u, workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t s = w; s < n_seeds; s += workers) run(s);
      });
    }
  }
  std::filesystem::create_directories(out_root);
  std::ofstream report(std::filesystem::path(out_root) / "sweep.tsv", std::ios::binary);
  report << "seed\tterminal_risk\trung\tstatus\n";
  int worst = kPass;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    const char* status = rows[s].status == kPass ? "PASS" : rows[s].status == kCheckFailed ? "FAIL" : "SOLVER_ERROR";
    report << s << '\t' << relugf::format_double(rows[s].terminal) << '\t' << (rows[s].rung.empty() ? "-" : rows[s].rung)
           << '\t' << status << '\n';
    worst = std::max(worst, rows[s].status);
  }
  std::cout << "wrote " << (std::filesystem::path(out_root) / "sweep.tsv").string() << '\n';
  return worst;
}

int cmd_ladder(std::size_t H, double alpha, double a, double b, double rho) {
  if (!(b > a) || !(rho > 0.0) || H == 0) {
    std::cerr << "ladder: need H >= 1, b > a and rho > 0\n";
    return kUsage;
  }
  const relugf::RiskLadder ladder = relugf::critical_ladder(H, alpha, relugf::DomainMeasure(a, b, rho));
  std::cout << "n\tvalue\n";
  for (const relugf::Rung& r : ladder.rungs) std::cout << r.label() << '\t' << relugf::format_double(r.value) << '\n';
  std::cout << "min_positive\t" << relugf::format_double(ladder.min_positive()) << '\n';
  return kPass;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, std::size_t cases, const std::string& out_path) {
  std::vector<relugf::PropertyResult> results;
  try {
    results = relugf::run_verify_suite(suite, seed, cases);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const relugf::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kNumeric;
  }
  relugf::write_verify_report(std::cout, results);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    relugf::write_verify_report(out, results);
  }
  for (const auto& r : results) {
    if (!r.pass) return kCheckFailed;
  }
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact-risk gradient-flow laboratory for shallow ReLU networks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* simulate = app.add_subcommand("simulate", "Integrate the flow described by a config file");
  simulate->add_option("-c,--config", config_path, "JSON config file")->required();
  simulate->add_option("-o,--out", out_dir, "Output directory (overrides output.directory)");

  std::size_t n_seeds = 10;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  auto* sweep = app.add_subcommand("sweep", "Run a random-init config over seeds 0..n-1");
  sweep->add_option("-c,--config", config_path, "JSON config file")->required();
  sweep->add_option("-n,--seeds", n_seeds, "Number of seeds")->check(CLI::PositiveNumber);
  sweep->add_option("-o,--out", out_dir, "Output root")->required();
  sweep->add_option("-j,--workers", workers, "Worker threads");

  std::size_t H = 1;
  double alpha = 1.0, a = 0.0, b = 1.0, rho = 1.0;
  auto* ladder = app.add_subcommand("ladder", "Print the critical-risk ladder for an affine target");
  ladder->add_option("--H", H, "Hidden width")->required();
  ladder->add_option("--alpha", alpha, "Target slope");
  ladder->add_option("--a", a, "Domain left end");
  ladder->add_option("--b", b, "Domain right end");
  ladder->add_option("--rho", rho, "Density");

  std::string suite = "all";
  std::uint64_t seed = 1;
  std::size_t cases = 100;
  std::string report_path;
  auto* verify = app.add_subcommand("verify", "Run property sweeps and print a TSV report");
  verify->add_option("-s,--suite", suite, "gradient | smoothing | flow | theory | highdim | all");
  verify->add_option("--seed", seed, "Seed for the random cases");
  verify->add_option("-n,--cases", cases, "Cases per property")->check(CLI::PositiveNumber);
  verify->add_option("-o,--out", report_path, "Also write the report to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*simulate) return cmd_simulate(config_path, out_dir);
  if (*sweep) return cmd_sweep(config_path, n_seeds, out_dir, workers);
  if (*ladder) return cmd_ladder(H, alpha, a, b, rho);
  return cmd_verify(suite, seed, cases, report_path);
}
