#include "fairbandit/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/random/uniform_real_distribution.hpp>

#include "fairbandit/errors.hpp"

namespace fairbandit {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::FairUCB: return "FairUCB";
    case PolicyKind::FairEpsGreedy: return "FairEpsGreedy";
    case PolicyKind::StaticFair: return "StaticFair";
    case PolicyKind::UnconstrainedUCB: return "UnconstrainedUCB";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (auto kind : {PolicyKind::FairUCB, PolicyKind::FairEpsGreedy, PolicyKind::StaticFair,
                    PolicyKind::UnconstrainedUCB}) {
    if (name == to_string(kind)) return kind;
  }
  throw std::invalid_argument("unknown policy kind '" + std::string(name) + "'");
}

bool is_fair(PolicyKind kind) { return kind != PolicyKind::UnconstrainedUCB; }

void validate(const PolicyParams& params) {
  if (!(params.confidence.delta > 0.0 && params.confidence.delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (!(params.confidence.width_scale > 0.0)) throw std::invalid_argument("width_scale must be positive");
  if (!(params.epsilon0 >= 0.0)) throw std::invalid_argument("epsilon0 must be nonnegative");
}

Policy::Policy(PolicyKind kind, std::shared_ptr<const FairPolytope> polytope, PolicyParams params,
               std::uint64_t seed)
    : kind_(kind), polytope_(std::move(polytope)), params_(params), rng_(seed) {
  if (!polytope_) throw std::invalid_argument("policy needs a polytope");
  validate(params_);
  const std::size_t k = polytope_->arms();
  counts_.assign(k, 0);
  means_.assign(k, 0.0);
  if (is_fair(kind_)) {
    if (!check_feasibility(*polytope_)) {
      throw InfeasibleError(std::string(to_string(kind_)) + " needs a nonempty fairness polytope");
    }
  }
  if (kind_ == PolicyKind::StaticFair) fixed_ = most_uniform_fair(*polytope_);
  if (kind_ == PolicyKind::FairEpsGreedy) uniform_fair_ = most_uniform_fair(*polytope_);
}

std::vector<double> Policy::upper_indices() const {
  const std::size_t k = arms();
  const double t = static_cast<double>(std::max<std::size_t>(steps_, 1));
  const double log_term = std::log(t * t * static_cast<double>(k) / params_.confidence.delta);
  std::vector<double> index(k, 1.0);
  for (std::size_t a = 0; a < k; ++a) {
    if (counts_[a] == 0) continue;
    const double width =
        params_.confidence.width_scale * std::sqrt(2.0 * log_term / static_cast<double>(counts_[a]));
    index[a] = std::min(1.0, means_[a] + width);
  }
  return index;
}

std::vector<double> Policy::vertex(std::size_t index) const { return polytope_->float_vertices()[index]; }

double Policy::uniform01() { return boost::random::uniform_real_distribution<double>(0.0, 1.0)(rng_); }

std::vector<double> Policy::select_distribution() {
  switch (kind_) {
    case PolicyKind::FairUCB: {
      const auto index = upper_indices();
      return vertex(maximize_linear_index(*polytope_, index));
    }
    case PolicyKind::FairEpsGreedy: {
      const double epsilon =
          steps_ == 0 ? 1.0 : std::min(1.0, params_.epsilon0 / static_cast<double>(steps_));
      if (uniform01() < epsilon) return uniform_fair_;
      return vertex(maximize_linear_index(*polytope_, means_));
    }
    case PolicyKind::StaticFair:
      return fixed_;
    case PolicyKind::UnconstrainedUCB: {
      const auto index = upper_indices();
      const auto best = static_cast<std::size_t>(std::max_element(index.begin(), index.end()) - index.begin());
      std::vector<double> p(arms(), 0.0);
      p[best] = 1.0;
      return p;
    }
  }
  throw std::logic_error("unhandled policy kind");
}

std::size_t Policy::sample_arm(std::span<const double> p) {
  if (p.size() != arms()) throw std::invalid_argument("sample_arm: distribution has wrong length");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= -kFeasibilityTol)) throw std::invalid_argument("sample_arm: negative probability");
    total += v;
  }
  if (std::abs(total - 1.0) > kFeasibilityTol) throw std::invalid_argument("sample_arm: probabilities do not sum to 1");

  const double u = uniform01();
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] <= 0.0) continue;
    last_positive = a;
    cumulative += p[a];
    if (u < cumulative) return a;
  }
  return last_positive;
}

void Policy::update(std::size_t arm, double reward) {
  if (arm >= arms()) throw std::invalid_argument("update: arm out of range");
  if (!(reward >= 0.0 && reward <= 1.0)) throw std::invalid_argument("update: reward outside [0, 1]");
  ++counts_[arm];
  means_[arm] += (reward - means_[arm]) / static_cast<double>(counts_[arm]);
  ++steps_;
}

ContextualPolicy::ContextualPolicy(PolicyKind kind, std::size_t contexts,
                                   std::shared_ptr<const FairPolytope> polytope, PolicyParams params,
                                   std::uint64_t seed) {
  if (contexts == 0) throw std::invalid_argument("contextual policy needs at least one context");
  policies_.reserve(contexts);
  for (std::size_t s = 0; s < contexts; ++s) policies_.emplace_back(kind, polytope, params, seed + s);
}

std::vector<double> ContextualPolicy::select_distribution(std::size_t context) {
  return policies_.at(context).select_distribution();
}

std::size_t ContextualPolicy::sample_arm(std::size_t context, std::span<const double> p) {
  return policies_.at(context).sample_arm(p);
}

void ContextualPolicy::update(std::size_t context, std::size_t arm, double reward) {
  policies_.at(context).update(arm, reward);
}

std::vector<double> ContextualPolicy::preview_distribution(std::size_t context) const {
  Policy copy = policies_.at(context);
  return copy.select_distribution();
}

}  // namespace fairbandit
