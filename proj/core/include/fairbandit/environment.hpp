#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fairbandit/fairness_polytope.hpp"
#include "fairbandit/rational.hpp"

namespace fairbandit {

enum class NoiseModel {
  Bernoulli,  ///< reward is 1 with probability mu, else 0
  Fixed,      ///< reward equals mu exactly
};

std::string_view to_string(NoiseModel noise);
NoiseModel parse_noise_model(std::string_view name);

struct EnvironmentSpec {
  std::vector<std::string> labels;
  RationalVector context_probs;
  /// means[s][a]: one row per context.
  std::vector<RationalVector> means;
  NoiseModel noise = NoiseModel::Bernoulli;
};

/// Stationary stochastic contextual environment. Immutable; draws take a
/// caller-owned engine so replications can run in parallel.
class Environment {
 public:
  using Engine = std::mt19937_64;

  std::size_t contexts() const noexcept { return labels_.size(); }
  std::size_t arms() const noexcept { return means_.empty() ? 0 : means_.front().size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const RationalVector& context_probs() const noexcept { return probs_; }
  const std::vector<RationalVector>& means() const noexcept { return means_; }
  const RationalVector& means(std::size_t context) const { return means_.at(context); }
  const std::vector<double>& float_means(std::size_t context) const { return float_means_.at(context); }
  NoiseModel noise() const noexcept { return noise_; }

  /// Common denominator M of every mean.
  Integer mean_denominator() const;

  std::size_t draw_context(Engine& rng) const;
  double draw_reward(std::size_t context, std::size_t arm, Engine& rng) const;

 private:
  friend Environment build_environment(EnvironmentSpec spec);
  Environment() = default;

  std::vector<std::string> labels_;
  RationalVector probs_;
  std::vector<RationalVector> means_;
  std::vector<std::vector<double>> float_means_;
  std::vector<double> cumulative_;
  NoiseModel noise_ = NoiseModel::Bernoulli;
};

/// Validates and freezes `spec`. Throws ConfigError naming the bad field.
Environment build_environment(EnvironmentSpec spec);

/// Per-context optimal policy together with its exact values.
struct OptimalPolicy {
  /// Fair optimum g*(s): a vertex of C per context (empty when not computed).
  std::vector<RationalVector> fair_vertex;
  std::vector<Rational> fair_value;
  /// Unconstrained optimum f*(s): best arm per context.
  std::vector<std::size_t> best_arm;
  std::vector<Rational> best_value;
  Rational expected_fair_value;
  Rational expected_best_value;
};

/// Unconstrained part only (f*); ties go to the smallest arm index.
OptimalPolicy optimal_unconstrained_policy(const Environment& env);

/// Both g* and f*. Throws InfeasibleError for an empty polytope.
OptimalPolicy optimal_fair_policy(const Environment& env, const FairPolytope& polytope);

}  // namespace fairbandit
