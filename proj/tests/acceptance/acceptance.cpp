// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fairbandit/experiment.hpp"
#include "fairbandit/unimodular.hpp"
#include "oracles.hpp"

using namespace fairbandit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string two_context_config(const std::string& lower, const std::string& upper, const std::string& policies,
                               std::size_t horizon, std::size_t replications, std::uint64_t seed,
                               const std::string& checkpoints) {
  std::ostringstream s;
  s << R"({
    "environment": {
      "contexts": [{"label": "r", "prob": "1/2"}, {"label": "d", "prob": "1/2"}],
      "means": [["9/10", "2/10"], ["2/10", "9/10"]]
    },
    "fairness": {"groups": [[0], [1]], "lower": [")"
    << lower << R"(", ")" << lower << R"("], "upper": [")" << upper << R"(", ")" << upper << R"("]},
    "policies": )" << policies
    << R"(,
    "horizon": )" << horizon
    << R"(,
    "replications": )" << replications
    << R"(,
    "seed": )" << seed
    << R"(,
    "checkpoints": )" << checkpoints
    << "\n  }";
  return s.str();
}

const char* kOverlapConfig = R"({
  "environment": {
    "contexts": [{"label": "young", "prob": "3/5"}, {"label": "old", "prob": "2/5"}],
    "means": [["1/2", "3/10", "2/5", "1/10"], ["1/10", "3/5", "1/5", "7/10"]]
  },
  "fairness": {"groups": [[0, 1], [1, 2], [3]], "lower": ["1/5", "1/5", "1/10"], "upper": ["4/5", "3/5", "1/2"]},
  "policies": [{"kind": "FairUCB"}, {"kind": "FairEpsGreedy"}, {"kind": "StaticFair"}],
  "horizon": 50000,
  "replications": 4,
  "seed": 101
})";

const std::string kFairPolicies = R"([{"kind": "FairUCB"}, {"kind": "FairEpsGreedy"}, {"kind": "StaticFair"}])";

Outcome fairness_by_construction() {
  const std::vector<ExperimentConfig> configs{
      parse_config(two_context_config("1/4", "3/4", kFairPolicies, 50000, 4, 7, "[50000]")),
      parse_config(two_context_config("2/5", "3/5", kFairPolicies, 50000, 4, 8, "[50000]")),
      parse_config(kOverlapConfig)};
  std::size_t steps = 0;
  std::size_t violations = 0;
  double worst_slack = 1.0;
  for (const auto& config : configs) {
    const auto summary = run_experiment(config, {.threads = worker_threads(), .write_files = false});
    for (const auto& p : summary.policies) {
      steps += config.horizon * config.replications;
      violations += p.fairness.violations.count;
      if (p.fairness.violations.max_magnitude != 0.0) ++violations;
      for (std::size_t i = 0; i < p.fairness.alpha_by_group.size(); ++i) {
        worst_slack = std::min(worst_slack, p.fairness.alpha_by_group[i] - p.fairness.guaranteed_alpha[i]);
      }
    }
  }
  std::ostringstream d;
  d << steps << " steps, " << violations << " violations, min(alpha - guaranteed) = " << worst_slack;
  return {steps >= 1000000 && violations == 0 && worst_slack >= -2e-9, d.str()};
}

Outcome gamma_bound() {
  std::mt19937_64 rng(20240601);
  std::size_t instances = 0;
  std::size_t checked = 0;
  std::size_t failures = 0;
  while (instances < 50) {
    const std::size_t k = 2 + rng() % 7;
    const std::size_t g = 1 + rng() % 4;
    const long long m = static_cast<long long>(k) + static_cast<long long>(rng() % (20 - k + 1));
    const long long n = 1 + static_cast<long long>(rng() % 20);
    std::vector<std::vector<std::size_t>> groups(g);
    for (std::size_t a = 0; a < k; ++a) {
      const auto label = rng() % (g + 1);
      if (label < g) groups[label].push_back(a);
    }
    std::erase_if(groups, [](const auto& grp) { return grp.empty(); });
    RationalVector lower, upper;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      long long lo = static_cast<long long>(rng() % (n + 1));
      long long hi = static_cast<long long>(rng() % (n + 1));
      if (lo > hi) std::swap(lo, hi);
      lower.emplace_back(lo, n);
      upper.emplace_back(hi, n);
    }
    const GroupStructure structure(k, groups);
    const FairPolytope polytope(structure, FairnessBounds(lower, upper));
    if (!check_feasibility(polytope)) continue;
    ++instances;
    std::vector<long long> numerators(static_cast<std::size_t>(m) + 1);
    std::iota(numerators.begin(), numerators.end(), 0);
    std::shuffle(numerators.begin(), numerators.end(), rng);
    RationalVector mu;
    for (std::size_t a = 0; a < k; ++a) mu.emplace_back(numerators[a], m);
    const auto gamma = compute_gamma(polytope, mu);
    if (gamma.infinite() || gamma.degenerate) continue;
    ++checked;
    if (gamma.gamma < gamma_lower_bound(structure, m, n)) ++failures;
  }
  std::ostringstream d;
  d << instances << " instances, " << checked << " non-degenerate, " << failures << " failures";
  return {failures == 0 && checked > 0, d.str()};
}

// Every disjoint group structure on k arms: each arm is uncovered or in one
// group; groups are unlabeled.
std::vector<std::vector<std::vector<std::size_t>>> disjoint_structures(std::size_t k) {
  std::set<std::vector<std::vector<std::size_t>>> seen;
  std::vector<std::size_t> label(k, 0);
  while (true) {
    std::map<std::size_t, std::vector<std::size_t>> by_label;
    for (std::size_t a = 0; a < k; ++a)
      if (label[a] > 0) by_label[label[a]].push_back(a);
    std::vector<std::vector<std::size_t>> groups;
    for (auto& [l, members] : by_label) groups.push_back(members);
    std::sort(groups.begin(), groups.end());
    seen.insert(groups);
    std::size_t i = 0;
    while (i < k && label[i] == k) label[i++] = 0;
    if (i == k) break;
    ++label[i];
  }
  return {seen.begin(), seen.end()};
}

Outcome tu_certification() {
  std::size_t matrices = 0;
  std::size_t failures = 0;
  for (std::size_t k = 1; k <= 6; ++k) {
    for (const auto& groups : disjoint_structures(k)) {
      const auto m = constraint_matrix(GroupStructure(k, groups));
      ++matrices;
      if (!is_totally_unimodular(m, {m.size(), k})) ++failures;
    }
  }
  std::ostringstream d;
  d << matrices << " constraint matrices, " << failures << " not totally unimodular";
  return {failures == 0, d.str()};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(4040);
  std::size_t objectives = 0;
  std::size_t mismatches = 0;
  while (objectives < 100) {
    oracle::Instance inst;
    inst.k = 2 + rng() % 3;
    const std::size_t g = 1 + rng() % 3;
    std::vector<std::vector<std::size_t>> groups(g);
    for (std::size_t a = 0; a < inst.k; ++a) {
      const auto label = rng() % (g + 1);
      if (label < g) groups[label].push_back(a);
    }
    std::erase_if(groups, [](const auto& grp) { return grp.empty(); });
    inst.groups = groups;
    for (std::size_t i = 0; i < groups.size(); ++i) {
      long long lo = static_cast<long long>(rng() % 41);
      long long hi = static_cast<long long>(rng() % 41);
      if (lo > hi) std::swap(lo, hi);
      inst.lower.emplace_back(lo, 40);
      inst.upper.emplace_back(hi, 40);
    }
    const FairPolytope polytope(GroupStructure(inst.k, inst.groups), FairnessBounds(inst.lower, inst.upper));
    if (!check_feasibility(polytope)) continue;
    RationalVector weights;
    for (std::size_t a = 0; a < inst.k; ++a) weights.emplace_back(static_cast<long long>(rng() % 101), 100);
    const auto grid = oracle::grid_maximum(inst, weights, 40);
    const auto best = maximize_linear(polytope, weights);
    if (!grid || *grid != best.value) ++mismatches;
    ++objectives;
  }
  std::ostringstream d;
  d << objectives << " objectives, " << mismatches << " mismatches";
  return {mismatches == 0, d.str()};
}

// Shared by the regret-growth and gamma-sensitivity criteria.
struct RegretRuns {
  bool done = false;
  ExperimentSummary wide;   // bounds [1/4, 3/4]
  ExperimentSummary tight;  // bounds [2/5, 3/5]
};

RegretRuns& regret_runs() {
  static RegretRuns runs;
  if (!runs.done) {
    const std::string ucb = R"([{"kind": "FairUCB"}])";
    const auto wide = parse_config(two_context_config("1/4", "3/4", ucb, 100000, 20, 1000, "[1000, 10000, 100000]"));
    const auto tight = parse_config(two_context_config("2/5", "3/5", ucb, 100000, 20, 1000, "[1000, 10000, 100000]"));
    runs.wide = run_experiment(wide, {.threads = worker_threads(), .write_files = false});
    runs.tight = run_experiment(tight, {.threads = worker_threads(), .write_files = false});
    runs.done = true;
  }
  return runs;
}

Outcome regret_growth() {
  const auto& runs = regret_runs();
  const auto& stats = runs.wide.policies.at(0).fair_regret;
  const double r3 = stats.at(0).mean, r4 = stats.at(1).mean, r5 = stats.at(2).mean;
  // Summing 1e5 per-step gaps of exactly zero leaves roundoff around 1e-12;
  // increments that small are not growth in either direction.
  auto increment = [](double from, double to) { return std::abs(to - from) < 1e-9 ? 0.0 : to - from; };
  std::ostringstream d;
  d << "gamma = " << runs.wide.gammas.at(0).gamma.gamma_string() << ", mean fair regret at 1e3/1e4/1e5 = " << r3
    << " / " << r4 << " / " << r5 << ", increments " << (r4 - r3) << " then " << (r5 - r4)
    << ", regret/T = " << r5 / 1e5;
  return {increment(r4, r5) < increment(r3, r4) && r5 / 1e5 < 0.01, d.str()};
}

Outcome gamma_sensitivity() {
  const auto& runs = regret_runs();
  const auto& g_wide = runs.wide.gammas.at(0).gamma;
  const auto& g_tight = runs.tight.gammas.at(0).gamma;
  const double wide = runs.wide.policies.at(0).fair_regret.at(2).mean;
  const double tight = runs.tight.policies.at(0).fair_regret.at(2).mean;
  std::ostringstream d;
  d << "gamma " << g_wide.gamma_string() << " -> regret(1e5) = " << wide << ", gamma " << g_tight.gamma_string()
    << " -> regret(1e5) = " << tight;
  return {g_tight.gamma < g_wide.gamma && tight > wide, d.str()};
}

Outcome worked_example() {
  const GroupStructure partition(2, {{0}, {1}});
  const FairnessBounds bounds({Rational(1, 4), Rational(1, 4)}, {Rational(3, 4), Rational(3, 4)});
  auto polytope = std::make_shared<const FairPolytope>(partition, bounds);
  const auto config = parse_config(two_context_config("1/4", "3/4", kFairPolicies, 10000, 3, 77, "[10000]"));
  const auto env = build_environment(config.environment);

  double min_mass = 1.0;
  for (auto kind : {PolicyKind::FairUCB, PolicyKind::FairEpsGreedy, PolicyKind::StaticFair}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto history = simulate(env, polytope, kind, {}, 10000, 77 + seed);
      for (const auto& step : history.steps()) {
        for (const auto& p : step.context_distributions) {
          min_mass = std::min({min_mass, partition.mass(0, p), partition.mass(1, p)});
        }
      }
    }
  }

  // Static policy: context r plays (0.75, 0.25), context d plays (0.25, 0.75).
  const std::vector<double> r{0.75, 0.25};
  const std::vector<double> d{0.25, 0.75};
  History history;
  for (std::size_t t = 0; t < 1000; ++t) {
    const std::size_t s = t % 2;
    history.append_step({t, s, s == 0 ? r : d, s, 1.0, {r, d}});
  }
  const auto report = empirical_fairness(std::span<const History>(&history, 1), partition, bounds);
  std::ostringstream out;
  out << "smallest group mass emitted = " << min_mass << ", static alpha_R = " << report.alpha_by_group[0];
  return {min_mass >= 0.25 - 1e-9 && report.alpha_by_group[0] == 0.5, out.str()};
}

Outcome unfairness_demonstration() {
  const auto config = parse_config(two_context_config("1/4", "3/4", R"([{"kind": "UnconstrainedUCB"}])", 20000, 5,
                                                      55, "[20000]"));
  const auto env = build_environment(config.environment);
  auto polytope = std::make_shared<const FairPolytope>(config.structure, config.bounds);
  const std::size_t horizon = config.horizon;
  const std::size_t tail = horizon / 10;
  std::size_t converged = 0;
  std::size_t alpha_nonzero = 0;
  for (std::size_t run = 0; run < config.replications; ++run) {
    const auto history = simulate(env, polytope, PolicyKind::UnconstrainedUCB, {}, horizon, config.seed + run);
    const auto report = empirical_fairness(std::span<const History>(&history, 1), config.structure, config.bounds);
    for (std::size_t t = horizon - tail; t < horizon; ++t) {
      const auto& all = history[t].context_distributions;
      if (all[0] != std::vector<double>{1.0, 0.0} || all[1] != std::vector<double>{0.0, 1.0}) continue;
      ++converged;
      for (const auto& per_group : report.alpha_by_step)
        if (per_group[t] != 0.0) ++alpha_nonzero;
    }
  }
  const double fraction = static_cast<double>(converged) / static_cast<double>(tail * config.replications);
  std::ostringstream d;
  d << "final " << tail << " steps x " << config.replications << " runs: " << fraction * 100.0
    << "% at opposite point masses, alpha != 0 on " << alpha_nonzero << " of those steps";
  return {fraction >= 0.99 && alpha_nonzero == 0, d.str()};
}

std::map<std::string, std::string> read_traces(const fs::path& dir) {
  std::map<std::string, std::string> files;
  if (!fs::exists(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[entry.path().filename().string()] = s.str();
  }
  return files;
}

Outcome reproducibility() {
  const auto root = fs::temp_directory_path() / "fairbandit_acceptance_repro";
  fs::remove_all(root);
  fs::create_directories(root);
  const auto config_path = root / "config.json";
  std::ofstream(config_path) << two_context_config("1/4", "3/4", kFairPolicies, 3000, 3, 2718, "[1000, 3000]");

  int codes[2];
  for (int i = 0; i < 2; ++i) {
    const auto out = root / ("out" + std::to_string(i));
    const std::string cmd = std::string("\"") + FAIRBANDIT_CLI_PATH + "\" run \"" + config_path.string() +
                            "\" --out-dir \"" + out.string() + "\" > \"" + (root / "log.txt").string() + "\" 2>&1";
    codes[i] = std::system(cmd.c_str());
  }
  const auto a = read_traces(root / "out0" / "traces");
  const auto b = read_traces(root / "out1" / "traces");
  std::size_t bytes = 0;
  for (const auto& [name, content] : a) bytes += content.size();
  std::ostringstream d;
  d << a.size() << " trace files, " << bytes << " bytes, exit codes " << codes[0] << "/" << codes[1];
  const bool ok = codes[0] == 0 && codes[1] == 0 && a.size() == 9 && a == b;
  fs::remove_all(root);
  return {ok, d.str()};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "fairness by construction", 60, fairness_by_construction},
      {2, "gamma lower bound for disjoint groups", 60, gamma_bound},
      {3, "total unimodularity of disjoint-group matrices", 60, tu_certification},
      {4, "vertex scan matches rational grid", 120, oracle_equivalence},
      {5, "fair regret decelerates", 300, regret_growth},
      {6, "smaller gamma gives larger regret", 300, gamma_sensitivity},
      {7, "two-group worked example", 60, worked_example},
      {8, "unconstrained UCB is unfair", 60, unfairness_demonstration},
      {9, "byte-identical traces", 60, reproducibility},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.limit_seconds;
    const bool pass = outcome.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s [%d] %s: %s (%.1f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, outcome.detail.c_str(), seconds,
                in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
