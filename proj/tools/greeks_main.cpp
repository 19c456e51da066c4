// greeks: run Monte Carlo sensitivity experiments from a config file.
//
//   greeks run <config> [--seed N] [--threads K] [--out PATH]
//   greeks bench-hessian <config>
//   greeks list-methods
//
// Exit codes: 0 ok, 2 configuration or usage error, 3 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "greeks/cli/experiment.hpp"
#include "greeks/errors.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericalExit = 3;

int run(const std::string& path, const greeks::cli::Overrides& ov, const std::string& out) {
  auto cfg = greeks::cli::load_experiment_file(path);
  greeks::cli::apply_overrides(cfg, ov);
  if (!out.empty()) cfg.out_path = out;
  const auto rows = greeks::cli::run_experiment(cfg);
  if (cfg.out_path.empty() || cfg.out_path == "-") {
    greeks::cli::write_csv(std::cout, rows, cfg.timing);
    return 0;
  }
  std::ofstream f(cfg.out_path);
  if (!f) throw greeks::ConfigError("cannot open output file '" + cfg.out_path + "'");
  greeks::cli::write_csv(f, rows, cfg.timing);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vibrato + AD Monte Carlo greeks"};
  app.require_subcommand(1);

  std::string cfg_path, out_path;
  greeks::cli::Overrides ov;
  std::uint64_t seed = 0;
  int threads = 0;
  auto* run_cmd = app.add_subcommand("run", "run the experiment described by a config file");
  run_cmd->add_option("config", cfg_path, "config file")->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "override the RNG seed");
  auto* thr_opt = run_cmd->add_option("--threads", threads, "worker threads (0 = hardware)")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--out", out_path, "CSV output path (default: stdout)");

  std::string bench_path;
  auto* bench_cmd = app.add_subcommand("bench-hessian", "time the FD Hessian against one VRAD pass");
  bench_cmd->add_option("config", bench_path, "config file")->required();

  auto* list_cmd = app.add_subcommand("list-methods", "list the available estimators");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigExit;
  }

  try {
    if (*run_cmd) {
      if (*seed_opt) ov.seed = seed;
      if (*thr_opt) ov.threads = threads;
      return run(cfg_path, ov, out_path);
    }
    if (*bench_cmd) {
      auto cfg = greeks::cli::load_experiment_file(bench_path);
      std::cout << greeks::cli::format_bench(greeks::cli::bench_hessian(cfg));
      return 0;
    }
    if (*list_cmd) {
      for (const auto& m : greeks::cli::method_table())
        std::printf("%-15s %-6s %s\n", m.name, m.orders, m.description);
      return 0;
    }
  } catch (const greeks::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const greeks::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumericalExit;
  } catch (const std::logic_error& e) {
    // DomainError, NotApplicable and friends: the config asked for something
    // the library cannot do.
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigExit;
  }
  return 0;
}
