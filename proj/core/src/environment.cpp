#include "fairbandit/environment.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/random/uniform_real_distribution.hpp>

#include "fairbandit/errors.hpp"

namespace fairbandit {

std::string_view to_string(NoiseModel noise) {
  return noise == NoiseModel::Bernoulli ? "bernoulli" : "fixed";
}

NoiseModel parse_noise_model(std::string_view name) {
  if (name == "bernoulli") return NoiseModel::Bernoulli;
  if (name == "fixed") return NoiseModel::Fixed;
  throw std::invalid_argument("unknown noise model '" + std::string(name) + "'");
}

Environment build_environment(EnvironmentSpec spec) {
  const std::size_t n = spec.context_probs.size();
  if (n == 0) throw ConfigError("environment.contexts", "at least one context is required");
  if (spec.labels.size() != n) throw ConfigError("environment.contexts", "labels and probabilities differ in length");
  if (spec.means.size() != n) {
    throw ConfigError("environment.means", "expected one row per context (" + std::to_string(n) + ")");
  }
  Rational total = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (spec.context_probs[s] < 0) {
      throw ConfigError("environment.contexts[" + std::to_string(s) + "].prob", "negative probability");
    }
    total += spec.context_probs[s];
  }
  if (total != 1) {
    throw ConfigError("environment.contexts", "probabilities sum to " + to_string(total) + ", not 1");
  }
  const std::size_t k = spec.means.front().size();
  if (k == 0) throw ConfigError("environment.means", "at least one arm is required");
  for (std::size_t s = 0; s < n; ++s) {
    if (spec.means[s].size() != k) {
      throw ConfigError("environment.means[" + std::to_string(s) + "]", "row length differs from row 0");
    }
    for (std::size_t a = 0; a < k; ++a) {
      const auto& mu = spec.means[s][a];
      if (mu < 0 || mu > 1) {
        throw ConfigError("environment.means[" + std::to_string(s) + "][" + std::to_string(a) + "]",
                          "mean " + to_string(mu) + " outside [0, 1]");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (spec.labels[i] == spec.labels[j]) {
        throw ConfigError("environment.contexts", "duplicate context label '" + spec.labels[i] + "'");
      }
    }
  }

  Environment env;
  env.labels_ = std::move(spec.labels);
  env.probs_ = std::move(spec.context_probs);
  env.means_ = std::move(spec.means);
  env.noise_ = spec.noise;
  Rational running = 0;
  for (std::size_t s = 0; s < n; ++s) {
    env.float_means_.push_back(to_doubles(env.means_[s]));
    running += env.probs_[s];
    env.cumulative_.push_back(to_double(running));
  }
  return env;
}

Integer Environment::mean_denominator() const {
  RationalVector all;
  for (const auto& row : means_) all.insert(all.end(), row.begin(), row.end());
  return common_denominator(all);
}

std::size_t Environment::draw_context(Engine& rng) const {
  if (contexts() == 1) return 0;
  const double u = boost::random::uniform_real_distribution<double>(0.0, 1.0)(rng);
  for (std::size_t s = 0; s < cumulative_.size(); ++s) {
    if (u < cumulative_[s] && probs_[s] > 0) return s;
  }
  for (std::size_t s = contexts(); s-- > 0;) {
    if (probs_[s] > 0) return s;
  }
  return 0;
}

double Environment::draw_reward(std::size_t context, std::size_t arm, Engine& rng) const {
  if (context >= contexts() || arm >= arms()) throw std::invalid_argument("draw_reward: index out of range");
  const double mu = float_means_[context][arm];
  if (noise_ == NoiseModel::Fixed) return mu;
  const double u = boost::random::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return u < mu ? 1.0 : 0.0;
}

OptimalPolicy optimal_unconstrained_policy(const Environment& env) {
  OptimalPolicy out;
  out.expected_best_value = 0;
  for (std::size_t s = 0; s < env.contexts(); ++s) {
    const auto& mu = env.means(s);
    std::size_t best = 0;
    for (std::size_t a = 1; a < mu.size(); ++a) {
      if (mu[a] > mu[best]) best = a;
    }
    out.best_arm.push_back(best);
    out.best_value.push_back(mu[best]);
    out.expected_best_value += env.context_probs()[s] * mu[best];
  }
  return out;
}

OptimalPolicy optimal_fair_policy(const Environment& env, const FairPolytope& polytope) {
  if (polytope.arms() != env.arms()) throw std::invalid_argument("polytope and environment disagree on k");
  OptimalPolicy out = optimal_unconstrained_policy(env);
  out.expected_fair_value = 0;
  for (std::size_t s = 0; s < env.contexts(); ++s) {
    auto optimum = maximize_linear(polytope, env.means(s));
    out.expected_fair_value += env.context_probs()[s] * optimum.value;
    out.fair_vertex.push_back(std::move(optimum.vertex));
    out.fair_value.push_back(std::move(optimum.value));
  }
  return out;
}

}  // namespace fairbandit
