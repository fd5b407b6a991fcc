#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairbandit/fairness_polytope.hpp"

namespace fairbandit {

enum class PolicyKind { FairUCB, FairEpsGreedy, StaticFair, UnconstrainedUCB };

std::string_view to_string(PolicyKind kind);
/// Throws std::invalid_argument for unknown names.
PolicyKind parse_policy_kind(std::string_view name);
bool is_fair(PolicyKind kind);

struct ConfidenceParams {
  double delta = 0.05;
  double width_scale = 1.0;
};

struct PolicyParams {
  ConfidenceParams confidence;
  /// Exploration schedule eps_t = min(1, epsilon0 / t) for FairEpsGreedy.
  double epsilon0 = 5.0;
};

/// Throws std::invalid_argument unless 0 < delta < 1, width_scale > 0 and
/// epsilon0 >= 0.
void validate(const PolicyParams& params);

/// One bandit learner. select/sample/update mutate the state and must be
/// serialized by the caller; distinct policies are independent.
class Policy {
 public:
  /// Throws InfeasibleError when a fair kind is given an empty polytope.
  Policy(PolicyKind kind, std::shared_ptr<const FairPolytope> polytope, PolicyParams params,
         std::uint64_t seed);

  PolicyKind kind() const noexcept { return kind_; }
  std::size_t arms() const noexcept { return counts_.size(); }
  std::size_t steps() const noexcept { return steps_; }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }
  const std::vector<double>& means() const noexcept { return means_; }
  const FairPolytope& polytope() const noexcept { return *polytope_; }
  /// The distribution StaticFair plays (empty for other kinds).
  const std::vector<double>& fixed_distribution() const noexcept { return fixed_; }

  /// Optimistic index per arm: 1 for unpulled arms, otherwise
  /// min(1, mean + width_scale * sqrt(2 ln(t^2 k / delta) / n_a)).
  std::vector<double> upper_indices() const;

  /// The distribution p^t to play now. FairEpsGreedy consumes randomness.
  std::vector<double> select_distribution();

  /// Inverse-CDF draw from `p`; throws std::invalid_argument unless p is a
  /// length-k vector with nonnegative entries summing to 1 within 1e-9.
  std::size_t sample_arm(std::span<const double> p);

  /// Throws std::invalid_argument for an invalid arm or a reward outside [0,1].
  void update(std::size_t arm, double reward);

 private:
  std::vector<double> vertex(std::size_t index) const;
  double uniform01();

  PolicyKind kind_;
  std::shared_ptr<const FairPolytope> polytope_;
  PolicyParams params_;
  std::vector<std::size_t> counts_;
  std::vector<double> means_;
  std::size_t steps_ = 0;
  std::vector<double> fixed_;
  std::vector<double> uniform_fair_;
  std::mt19937_64 rng_;
};

/// One independent policy per context, seeded seed + context index.
class ContextualPolicy {
 public:
  ContextualPolicy(PolicyKind kind, std::size_t contexts, std::shared_ptr<const FairPolytope> polytope,
                   PolicyParams params, std::uint64_t seed);

  std::size_t contexts() const noexcept { return policies_.size(); }
  const Policy& policy(std::size_t context) const { return policies_.at(context); }

  std::vector<double> select_distribution(std::size_t context);
  std::size_t sample_arm(std::size_t context, std::span<const double> p);
  void update(std::size_t context, std::size_t arm, double reward);

  /// What `context` would play now, computed on a copy so no state advances.
  std::vector<double> preview_distribution(std::size_t context) const;

 private:
  std::vector<Policy> policies_;
};

}  // namespace fairbandit
