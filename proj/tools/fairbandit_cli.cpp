// fairbandit: run fairness-constrained bandit experiments from a JSON config.
//
//   fairbandit run <config> [--seed N] [--out-dir DIR] [--threads N]
//   fairbandit gamma <config>
//   fairbandit vertices <config>
//
// Exit codes: 0 success, 2 config error, 3 infeasible instance, 4 runtime failure.
// FAIRBANDIT_THREADS sets the default thread count for `run`.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fairbandit/errors.hpp"
#include "fairbandit/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitRuntime = 4;

std::size_t default_threads() {
  if (const char* env = std::getenv("FAIRBANDIT_THREADS")) {
    try {
      const auto n = std::stoul(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid FAIRBANDIT_THREADS='" << env << "'\n";
  }
  return 1;
}

void print_summary(const fairbandit::ExperimentSummary& summary, const std::filesystem::path& out_dir) {
  for (const auto& g : summary.gammas) {
    std::cout << "context " << g.label << ": gamma = " << g.gamma.gamma_string()
              << (g.gamma.degenerate ? " (degenerate)" : "") << '\n';
  }
  std::cout << "gamma lower bound = " << fairbandit::to_string(summary.gamma_lower_bound) << '\n';
  for (const auto& p : summary.policies) {
    std::cout << p.name << ":";
    for (const auto& c : p.fair_regret) std::cout << "  t=" << c.step << " fair_regret=" << c.mean << " +- " << c.stderr_;
    std::cout << "  alpha=" << p.fairness.alpha << "  violations=" << p.fairness.violations.count << '\n';
  }
  std::cout << "results written to " << out_dir.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness-constrained contextual bandit experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::size_t threads = default_threads();

  auto* run = app.add_subcommand("run", "Run all replications and write traces and summaries");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--seed", seed, "Override the base seed");
  run->add_option("--out-dir", out_dir, "Override the output directory");
  run->add_option("--threads", threads, "Worker threads (default: $FAIRBANDIT_THREADS or 1)")->check(CLI::PositiveNumber);

  auto* gamma = app.add_subcommand("gamma", "Print the gap gamma per context and its lower bound");
  gamma->add_option("config", config_path, "Experiment config (JSON)")->required();

  auto* vertices = app.add_subcommand("vertices", "Print the vertices of the fairness polytope");
  vertices->add_option("config", config_path, "Experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    auto config = fairbandit::load_config(config_path);
    if (*run) {
      if (seed) config.seed = *seed;
      if (out_dir) config.output_dir = *out_dir;
      const auto summary = fairbandit::run_experiment(config, {.threads = threads, .write_files = true});
      print_summary(summary, config.output_dir);
    } else if (*gamma) {
      std::cout << fairbandit::gamma_report(config) << '\n';
    } else if (*vertices) {
      std::cout << fairbandit::vertices_report(config) << '\n';
    }
  } catch (const fairbandit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fairbandit::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
