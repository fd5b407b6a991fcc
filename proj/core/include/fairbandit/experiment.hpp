#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairbandit/environment.hpp"
#include "fairbandit/fairness_polytope.hpp"
#include "fairbandit/metrics.hpp"
#include "fairbandit/policies.hpp"

namespace fairbandit {

struct PolicyConfig {
  std::string name;
  PolicyKind kind = PolicyKind::FairUCB;
  PolicyParams params;
};

struct ExperimentConfig {
  EnvironmentSpec environment;
  GroupStructure structure;
  FairnessBounds bounds;
  std::vector<PolicyConfig> policies;
  std::size_t horizon = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> checkpoints;
  std::filesystem::path output_dir = "results";
  /// Write every n-th step to the trace files (the final step is always kept).
  std::size_t trace_every = 1;
};

/// Parses the JSON experiment description. Unknown keys are rejected.
/// Throws ConfigError naming the offending field.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Simulates one replication: seed drives both the policy (seed + context)
/// and the environment engine. When `record_all_contexts` is set, every step
/// also records what each other context would have been served.
History simulate(const Environment& env, std::shared_ptr<const FairPolytope> polytope, PolicyKind kind,
                 const PolicyParams& params, std::size_t horizon, std::uint64_t seed,
                 bool record_all_contexts = true);

struct CheckpointStat {
  std::size_t step = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct PolicySummary {
  std::string name;
  PolicyKind kind = PolicyKind::FairUCB;
  std::vector<CheckpointStat> fair_regret;
  std::vector<CheckpointStat> regret;
  FairnessReport fairness;
};

struct ContextGamma {
  std::string label;
  GammaResult gamma;
};

struct ExperimentSummary {
  std::vector<std::size_t> checkpoints;
  std::size_t replications = 0;
  std::vector<PolicySummary> policies;
  std::vector<ContextGamma> gammas;
  Rational gamma_lower_bound;
  Integer mean_denominator;
  Integer bound_denominator;
  std::size_t overlap_degree = 0;
  OptimalPolicy optimal;
  double wall_clock_seconds = 0.0;
};

struct RunOptions {
  std::size_t threads = 1;
  bool write_files = true;
};

/// Runs every configured policy for R replications (seeds base + j) and
/// writes traces/<policy>_run<j>.csv, summary.json and plot_data.csv under the
/// output directory. Throws InfeasibleError before any run when C is empty.
ExperimentSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Geometry of the configured instance, serialized as JSON text.
std::string gamma_report(const ExperimentConfig& config);
std::string vertices_report(const ExperimentConfig& config);

/// Summary as JSON text (deterministic except for "wall_clock_seconds").
std::string summary_json(const ExperimentSummary& summary);

struct PlotRow {
  std::string policy;
  std::size_t checkpoint = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Long-format fair-regret table: policy,checkpoint,mean,stderr.
void emit_plot_data(const ExperimentSummary& summary, const std::filesystem::path& path);
std::vector<PlotRow> read_plot_data(const std::filesystem::path& path);

/// "%.17g" formatting used by every CSV writer.
std::string format_double(double value);

}  // namespace fairbandit
