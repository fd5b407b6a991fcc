#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fairbandit/environment.hpp"
#include "fairbandit/fairness_polytope.hpp"

namespace fairbandit {

/// One interaction step. `distribution` is what the policy played in the
/// observed context; `context_distributions`, when present, holds p^t(s) for
/// every context s (the observed entry equals `distribution`).
struct StepRecord {
  std::size_t t = 0;
  std::size_t context = 0;
  std::vector<double> distribution;
  std::size_t arm = 0;
  double reward = 0.0;
  std::vector<std::vector<double>> context_distributions;
};

class History {
 public:
  /// Throws std::invalid_argument when record.t != size(), the distribution
  /// does not sum to 1 within 1e-9, or the reward is outside [0, 1].
  void append_step(StepRecord record);

  std::size_t size() const noexcept { return steps_.size(); }
  bool empty() const noexcept { return steps_.empty(); }
  const StepRecord& operator[](std::size_t t) const { return steps_[t]; }
  const std::vector<StepRecord>& steps() const noexcept { return steps_; }
  void reserve(std::size_t n) { steps_.reserve(n); }

 private:
  std::vector<StepRecord> steps_;
};

/// Cumulative regret after each step; entry t covers steps 0..t.
struct RegretTrace {
  /// t * E[value of the optimum] - sum of realized rewards.
  std::vector<double> realized;
  /// sum over steps of (value of the optimum in s^t) - <mu(s^t), p^t>.
  std::vector<double> pseudo;

  /// Values after `steps` steps for each checkpoint (1-based step counts).
  std::vector<double> pseudo_at(std::span<const std::size_t> checkpoints) const;
};

/// Regret against the best fair policy g*. `optimal` must come from
/// optimal_fair_policy on the same environment.
RegretTrace fair_regret(const History& history, const Environment& env, const OptimalPolicy& optimal);

/// Regret against the best unconstrained policy f*.
RegretTrace regret(const History& history, const Environment& env, const OptimalPolicy& optimal);

struct ViolationStats {
  std::size_t count = 0;
  double max_magnitude = 0.0;
};

/// Steps whose played distribution falls outside C at tolerance 1e-9, and the
/// worst bound excess among them.
ViolationStats constraint_violations(const History& history, const FairPolytope& polytope);

struct FairnessReport {
  /// alpha_by_step[i][t]: 1 - worst cross-context mass gap of group i at step t
  /// over all recorded runs.
  std::vector<std::vector<double>> alpha_by_step;
  std::vector<double> alpha_by_group;
  double alpha = 1.0;
  /// 1 - (u_i - l_i): what the constraints guarantee for the true supremum.
  std::vector<double> guaranteed_alpha;
  ViolationStats violations;
  std::size_t runs = 0;
};

/// Folds runs one at a time so callers need not keep every history alive.
class FairnessAccumulator {
 public:
  FairnessAccumulator(GroupStructure structure, FairnessBounds bounds);

  /// Throws std::invalid_argument when `history` differs in length, context
  /// count or arm count from the runs already added.
  void add(const History& history);
  FairnessReport report() const;

 private:
  FairPolytope polytope_;
  std::vector<std::vector<double>> worst_gap_;  // [group][t]
  std::size_t horizon_ = 0;
  std::size_t contexts_ = 0;
  ViolationStats violations_;
  std::size_t runs_ = 0;
};

FairnessReport empirical_fairness(std::span<const History> histories, const GroupStructure& structure,
                                  const FairnessBounds& bounds);

}  // namespace fairbandit
