#include "fairbandit/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fairbandit/errors.hpp"

namespace fairbandit {
namespace {

using nlohmann::ordered_json;

constexpr std::uint64_t kEnvironmentStream = 0x9E3779B97F4A7C15ULL;

struct RunResult {
  std::vector<double> fair_regret;  // at checkpoints
  std::vector<double> regret;
  FairnessReport fairness;
};

CheckpointStat summarize(std::size_t step, const std::vector<double>& values) {
  CheckpointStat stat;
  stat.step = step;
  double sum = 0.0;
  for (double v : values) sum += v;
  const auto n = static_cast<double>(values.size());
  stat.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - stat.mean) * (v - stat.mean);
    stat.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  }
  return stat;
}

FairnessReport combine(FairnessReport acc, const FairnessReport& run) {
  if (acc.runs == 0) return run;
  for (std::size_t i = 0; i < acc.alpha_by_step.size(); ++i) {
    for (std::size_t t = 0; t < acc.alpha_by_step[i].size(); ++t) {
      acc.alpha_by_step[i][t] = std::min(acc.alpha_by_step[i][t], run.alpha_by_step[i][t]);
    }
    acc.alpha_by_group[i] = std::min(acc.alpha_by_group[i], run.alpha_by_group[i]);
  }
  acc.alpha = std::min(acc.alpha, run.alpha);
  acc.violations.count += run.violations.count;
  acc.violations.max_magnitude = std::max(acc.violations.max_magnitude, run.violations.max_magnitude);
  acc.runs += run.runs;
  return acc;
}

void write_trace(const std::filesystem::path& path, std::size_t run, const History& history,
                 const RegretTrace& fair, const RegretTrace& unconstrained, const GroupStructure& structure,
                 const Environment& env, std::size_t every) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "run,t,context,arm,reward,fair_regret_realized,fair_regret_pseudo,regret_pseudo";
  for (std::size_t i = 0; i < structure.group_count(); ++i) {
    for (const auto& label : env.labels()) out << ",mass_g" << i << "_" << label;
  }
  out << '\n';
  for (std::size_t t = 0; t < history.size(); ++t) {
    if ((t + 1) % every != 0 && t + 1 != history.size()) continue;
    const auto& step = history[t];
    out << run << ',' << step.t << ',' << env.labels()[step.context] << ',' << step.arm << ','
        << format_double(step.reward) << ',' << format_double(fair.realized[t]) << ','
        << format_double(fair.pseudo[t]) << ',' << format_double(unconstrained.pseudo[t]);
    for (std::size_t i = 0; i < structure.group_count(); ++i) {
      for (std::size_t s = 0; s < env.contexts(); ++s) {
        const auto& p = step.context_distributions.empty() ? step.distribution : step.context_distributions[s];
        out << ',' << format_double(structure.mass(i, p));
      }
    }
    out << '\n';
  }
}

ordered_json vertex_json(const RationalVector& v) {
  ordered_json arr = ordered_json::array();
  for (const auto& x : v) arr.push_back(to_string(x));
  return arr;
}

ordered_json gamma_json(const ContextGamma& g) {
  ordered_json node;
  node["context"] = g.label;
  node["gamma"] = g.gamma.gamma_string();
  node["degenerate"] = g.gamma.degenerate;
  node["best_vertex"] = vertex_json(g.gamma.best_vertex);
  node["second_best_vertex"] = g.gamma.second_best_vertex ? vertex_json(*g.gamma.second_best_vertex) : ordered_json();
  return node;
}

struct Instance {
  Environment env;
  std::shared_ptr<const FairPolytope> polytope;
};

Instance make_instance(const ExperimentConfig& config) {
  Instance inst{build_environment(config.environment),
                std::make_shared<const FairPolytope>(config.structure, config.bounds)};
  if (inst.env.arms() != config.structure.arms()) {
    throw ConfigError("fairness", "arm count differs from environment.means");
  }
  return inst;
}

std::vector<ContextGamma> instance_gammas(const Instance& inst) {
  std::vector<ContextGamma> out;
  for (std::size_t s = 0; s < inst.env.contexts(); ++s) {
    out.push_back({inst.env.labels()[s], compute_gamma(*inst.polytope, inst.env.means(s))});
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

History simulate(const Environment& env, std::shared_ptr<const FairPolytope> polytope, PolicyKind kind,
                 const PolicyParams& params, std::size_t horizon, std::uint64_t seed, bool record_all_contexts) {
  ContextualPolicy policy(kind, env.contexts(), std::move(polytope), params, seed);
  Environment::Engine engine(seed ^ kEnvironmentStream);
  const bool others = record_all_contexts && env.contexts() > 1;

  History history;
  history.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    StepRecord step;
    step.t = t;
    step.context = env.draw_context(engine);
    step.distribution = policy.select_distribution(step.context);
    if (others) {
      step.context_distributions.resize(env.contexts());
      for (std::size_t s = 0; s < env.contexts(); ++s) {
        step.context_distributions[s] = s == step.context ? step.distribution : policy.preview_distribution(s);
      }
    }
    step.arm = policy.sample_arm(step.context, step.distribution);
    step.reward = env.draw_reward(step.context, step.arm, engine);
    policy.update(step.context, step.arm, step.reward);
    history.append_step(std::move(step));
  }
  return history;
}

ExperimentSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const Instance inst = make_instance(config);
  if (!check_feasibility(*inst.polytope)) throw InfeasibleError("the fairness constraints admit no distribution");

  ExperimentSummary summary;
  summary.checkpoints = config.checkpoints;
  summary.replications = config.replications;
  summary.optimal = optimal_fair_policy(inst.env, *inst.polytope);
  summary.gammas = instance_gammas(inst);
  summary.mean_denominator = inst.env.mean_denominator();
  summary.bound_denominator = config.bounds.common_denominator();
  summary.overlap_degree = overlap_degree(config.structure);
  summary.gamma_lower_bound = gamma_lower_bound(config.structure, summary.mean_denominator, summary.bound_denominator);

  const auto trace_dir = config.output_dir / "traces";
  if (options.write_files) std::filesystem::create_directories(trace_dir);

  for (const auto& policy : config.policies) {
    std::vector<RunResult> results(config.replications);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
      while (true) {
        const std::size_t run = next.fetch_add(1);
        if (run >= config.replications) return;
        try {
          const History history = simulate(inst.env, inst.polytope, policy.kind, policy.params, config.horizon,
                                           config.seed + run);
          const RegretTrace fair = fair_regret(history, inst.env, summary.optimal);
          const RegretTrace unconstrained = regret(history, inst.env, summary.optimal);
          FairnessAccumulator acc(config.structure, config.bounds);
          acc.add(history);
          results[run] = {fair.pseudo_at(config.checkpoints), unconstrained.pseudo_at(config.checkpoints),
                          acc.report()};
          if (options.write_files) {
            write_trace(trace_dir / (policy.name + "_run" + std::to_string(run) + ".csv"), run, history, fair,
                        unconstrained, config.structure, inst.env, config.trace_every);
          }
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(config.replications);
          return;
        }
      }
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, config.replications));
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    PolicySummary ps;
    ps.name = policy.name;
    ps.kind = policy.kind;
    for (std::size_t c = 0; c < config.checkpoints.size(); ++c) {
      std::vector<double> fair_values;
      std::vector<double> values;
      for (const auto& r : results) {
        fair_values.push_back(r.fair_regret[c]);
        values.push_back(r.regret[c]);
      }
      ps.fair_regret.push_back(summarize(config.checkpoints[c], fair_values));
      ps.regret.push_back(summarize(config.checkpoints[c], values));
    }
    for (const auto& r : results) ps.fairness = combine(std::move(ps.fairness), r.fairness);
    summary.policies.push_back(std::move(ps));
  }

  summary.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (options.write_files) {
    std::ofstream(config.output_dir / "summary.json", std::ios::binary) << summary_json(summary) << '\n';
    emit_plot_data(summary, config.output_dir / "plot_data.csv");
  }
  return summary;
}

std::string summary_json(const ExperimentSummary& summary) {
  ordered_json root;
  root["replications"] = summary.replications;
  root["checkpoints"] = summary.checkpoints;

  ordered_json geometry;
  geometry["overlap_degree"] = summary.overlap_degree;
  geometry["mean_denominator"] = summary.mean_denominator.str();
  geometry["bound_denominator"] = summary.bound_denominator.str();
  geometry["gamma_lower_bound"] = to_string(summary.gamma_lower_bound);
  geometry["contexts"] = ordered_json::array();
  for (std::size_t s = 0; s < summary.gammas.size(); ++s) {
    ordered_json node = gamma_json(summary.gammas[s]);
    if (s < summary.optimal.fair_vertex.size()) {
      node["fair_optimum"] = vertex_json(summary.optimal.fair_vertex[s]);
      node["fair_value"] = to_string(summary.optimal.fair_value[s]);
      node["best_arm"] = summary.optimal.best_arm[s];
      node["best_value"] = to_string(summary.optimal.best_value[s]);
    }
    geometry["contexts"].push_back(std::move(node));
  }
  geometry["expected_fair_value"] = to_string(summary.optimal.expected_fair_value);
  geometry["expected_best_value"] = to_string(summary.optimal.expected_best_value);
  root["geometry"] = std::move(geometry);

  root["policies"] = ordered_json::array();
  for (const auto& p : summary.policies) {
    ordered_json node;
    node["name"] = p.name;
    node["kind"] = std::string(to_string(p.kind));
    auto stats = [](const std::vector<CheckpointStat>& list) {
      ordered_json arr = ordered_json::array();
      for (const auto& c : list) arr.push_back({{"step", c.step}, {"mean", c.mean}, {"stderr", c.stderr_}});
      return arr;
    };
    node["fair_regret_pseudo"] = stats(p.fair_regret);
    node["regret_pseudo"] = stats(p.regret);
    ordered_json fairness;
    fairness["empirical_alpha"] = p.fairness.alpha;
    fairness["empirical_alpha_by_group"] = p.fairness.alpha_by_group;
    fairness["guaranteed_alpha_by_group"] = p.fairness.guaranteed_alpha;
    ordered_json at_checkpoints = ordered_json::array();
    for (std::size_t c : summary.checkpoints) {
      ordered_json per_group = ordered_json::array();
      for (const auto& series : p.fairness.alpha_by_step) per_group.push_back(series.at(c - 1));
      at_checkpoints.push_back({{"step", c}, {"empirical_alpha_by_group", per_group}});
    }
    fairness["at_checkpoints"] = std::move(at_checkpoints);
    fairness["violation_count"] = p.fairness.violations.count;
    fairness["max_violation"] = p.fairness.violations.max_magnitude;
    node["fairness"] = std::move(fairness);
    root["policies"].push_back(std::move(node));
  }
  root["wall_clock_seconds"] = summary.wall_clock_seconds;
  return root.dump(2);
}

std::string gamma_report(const ExperimentConfig& config) {
  const Instance inst = make_instance(config);
  if (!check_feasibility(*inst.polytope)) throw InfeasibleError("the fairness constraints admit no distribution");
  ordered_json root;
  root["overlap_degree"] = overlap_degree(config.structure);
  const Integer m = inst.env.mean_denominator();
  const Integer n = config.bounds.common_denominator();
  root["mean_denominator"] = m.str();
  root["bound_denominator"] = n.str();
  root["gamma_lower_bound"] = to_string(gamma_lower_bound(config.structure, m, n));
  root["vertex_count"] = inst.polytope->vertices().size();
  root["contexts"] = ordered_json::array();
  for (const auto& g : instance_gammas(inst)) root["contexts"].push_back(gamma_json(g));
  return root.dump(2);
}

std::string vertices_report(const ExperimentConfig& config) {
  const Instance inst = make_instance(config);
  ordered_json root;
  root["arms"] = config.structure.arms();
  const auto& vertices = inst.polytope->vertices();
  root["feasible"] = !vertices.empty();
  root["vertices"] = ordered_json::array();
  for (const auto& v : vertices) root["vertices"].push_back(vertex_json(v));
  if (vertices.empty()) throw InfeasibleError("the fairness constraints admit no distribution");
  return root.dump(2);
}

void emit_plot_data(const ExperimentSummary& summary, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "policy,checkpoint,mean,stderr\n";
  for (const auto& p : summary.policies) {
    for (const auto& c : p.fair_regret) {
      out << p.name << ',' << c.step << ',' << format_double(c.mean) << ',' << format_double(c.stderr_) << '\n';
    }
  }
}

std::vector<PlotRow> read_plot_data(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "policy,checkpoint,mean,stderr") throw Error("unexpected plot data header in " + path.string());
  std::vector<PlotRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    PlotRow row;
    std::string checkpoint, mean, err;
    if (!std::getline(fields, row.policy, ',') || !std::getline(fields, checkpoint, ',') ||
        !std::getline(fields, mean, ',') || !std::getline(fields, err)) {
      throw Error("malformed plot data row: " + line);
    }
    row.checkpoint = std::stoull(checkpoint);
    row.mean = std::stod(mean);
    row.stderr_ = std::stod(err);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fairbandit
