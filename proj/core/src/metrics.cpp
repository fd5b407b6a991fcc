#include "fairbandit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fairbandit {
namespace {

// Neumaier compensated running sum; traces run to 1e5+ steps.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
    else comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

RegretTrace trace_against(const History& history, const Environment& env, const std::vector<Rational>& values,
                          const Rational& expected) {
  if (values.size() != env.contexts()) throw std::invalid_argument("optimal policy does not match the environment");
  std::vector<double> per_context(values.size());
  for (std::size_t s = 0; s < values.size(); ++s) per_context[s] = to_double(values[s]);
  const double expected_value = to_double(expected);

  RegretTrace trace;
  trace.realized.reserve(history.size());
  trace.pseudo.reserve(history.size());
  CompensatedSum rewards;
  CompensatedSum pseudo;
  for (const auto& step : history.steps()) {
    if (step.context >= env.contexts()) throw std::invalid_argument("history context outside the environment");
    if (step.distribution.size() != env.arms()) throw std::invalid_argument("history arm count differs from the environment");
    const auto& mu = env.float_means(step.context);
    CompensatedSum played;
    for (std::size_t a = 0; a < mu.size(); ++a) played.add(mu[a] * step.distribution[a]);
    pseudo.add(per_context[step.context] - played.value());
    rewards.add(step.reward);
    trace.pseudo.push_back(pseudo.value());
    trace.realized.push_back(static_cast<double>(step.t + 1) * expected_value - rewards.value());
  }
  return trace;
}

}  // namespace

void History::append_step(StepRecord record) {
  if (record.t != steps_.size()) {
    throw std::invalid_argument("append_step: expected t = " + std::to_string(steps_.size()) + ", got " +
                                std::to_string(record.t));
  }
  double total = 0.0;
  for (double v : record.distribution) total += v;
  if (std::abs(total - 1.0) > kFeasibilityTol) throw std::invalid_argument("append_step: distribution does not sum to 1");
  if (!(record.reward >= 0.0 && record.reward <= 1.0)) throw std::invalid_argument("append_step: reward outside [0, 1]");
  steps_.push_back(std::move(record));
}

std::vector<double> RegretTrace::pseudo_at(std::span<const std::size_t> checkpoints) const {
  std::vector<double> out;
  out.reserve(checkpoints.size());
  for (std::size_t c : checkpoints) {
    if (c == 0 || c > pseudo.size()) throw std::out_of_range("checkpoint outside the trace");
    out.push_back(pseudo[c - 1]);
  }
  return out;
}

RegretTrace fair_regret(const History& history, const Environment& env, const OptimalPolicy& optimal) {
  return trace_against(history, env, optimal.fair_value, optimal.expected_fair_value);
}

RegretTrace regret(const History& history, const Environment& env, const OptimalPolicy& optimal) {
  return trace_against(history, env, optimal.best_value, optimal.expected_best_value);
}

ViolationStats constraint_violations(const History& history, const FairPolytope& polytope) {
  ViolationStats stats;
  for (const auto& step : history.steps()) {
    if (!contains(polytope, step.distribution, kFeasibilityTol)) {
      ++stats.count;
      stats.max_magnitude = std::max(stats.max_magnitude, max_violation(polytope, step.distribution));
    }
  }
  return stats;
}

FairnessAccumulator::FairnessAccumulator(GroupStructure structure, FairnessBounds bounds)
    : polytope_(std::move(structure), std::move(bounds)) {}

void FairnessAccumulator::add(const History& history) {
  const auto& structure = polytope_.structure();
  const std::size_t g = structure.group_count();
  std::size_t contexts = 0;
  if (!history.empty()) {
    contexts = std::max<std::size_t>(history[0].context_distributions.size(), 1);
  }
  if (runs_ == 0) {
    horizon_ = history.size();
    contexts_ = contexts;
    worst_gap_.assign(g, std::vector<double>(horizon_, 0.0));
  } else if (history.size() != horizon_ || contexts != contexts_) {
    throw std::invalid_argument("empirical_fairness: histories differ in horizon or context count");
  }

  for (const auto& step : history.steps()) {
    if (step.distribution.size() != structure.arms()) {
      throw std::invalid_argument("empirical_fairness: history arm count differs from the group structure");
    }
    const bool all_contexts = !step.context_distributions.empty();
    if (all_contexts && step.context_distributions.size() != contexts_) {
      throw std::invalid_argument("empirical_fairness: context count changes within a run");
    }
    for (std::size_t i = 0; i < g; ++i) {
      double gap = 0.0;
      if (all_contexts) {
        double lo = 1.0;
        double hi = 0.0;
        for (const auto& p : step.context_distributions) {
          const double m = structure.mass(i, p);
          lo = std::min(lo, m);
          hi = std::max(hi, m);
        }
        gap = std::max(0.0, hi - lo);
      }
      worst_gap_[i][step.t] = std::max(worst_gap_[i][step.t], gap);
    }
  }
  const auto stats = constraint_violations(history, polytope_);
  violations_.count += stats.count;
  violations_.max_magnitude = std::max(violations_.max_magnitude, stats.max_magnitude);
  ++runs_;
}

FairnessReport FairnessAccumulator::report() const {
  const auto& structure = polytope_.structure();
  const auto& bounds = polytope_.bounds();
  FairnessReport report;
  report.runs = runs_;
  report.violations = violations_;
  report.alpha = 1.0;
  for (std::size_t i = 0; i < structure.group_count(); ++i) {
    std::vector<double> alpha(worst_gap_.empty() ? 0 : worst_gap_[i].size());
    double group_min = 1.0;
    for (std::size_t t = 0; t < alpha.size(); ++t) {
      alpha[t] = std::clamp(1.0 - worst_gap_[i][t], 0.0, 1.0);
      group_min = std::min(group_min, alpha[t]);
    }
    report.alpha_by_step.push_back(std::move(alpha));
    report.alpha_by_group.push_back(group_min);
    report.alpha = std::min(report.alpha, group_min);
    report.guaranteed_alpha.push_back(to_double(1 - (bounds.upper()[i] - bounds.lower()[i])));
  }
  return report;
}

FairnessReport empirical_fairness(std::span<const History> histories, const GroupStructure& structure,
                                  const FairnessBounds& bounds) {
  FairnessAccumulator acc(structure, bounds);
  for (const auto& h : histories) acc.add(h);
  return acc.report();
}

}  // namespace fairbandit
