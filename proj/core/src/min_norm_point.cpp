#include "min_norm_point.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace fairbandit::detail {
namespace {

constexpr double kWeightEps = 1e-14;
constexpr int kMaxMajorIterations = 10000;

// Minimizer of ||Q_S alpha|| over the affine hull of the active columns.
Eigen::VectorXd affine_minimizer(const Eigen::MatrixXd& q, const std::vector<std::size_t>& active) {
  const auto m = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      kkt(i, j) = q.col(static_cast<Eigen::Index>(active[i])).dot(q.col(static_cast<Eigen::Index>(active[j])));
    }
    kkt(i, m) = 1.0;
    kkt(m, i) = 1.0;
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  rhs(m) = 1.0;
  Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
  return sol.head(m);
}

Eigen::VectorXd combine(const Eigen::MatrixXd& q, const std::vector<std::size_t>& active,
                        const std::vector<double>& weights) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(q.rows());
  for (std::size_t i = 0; i < active.size(); ++i) x += weights[i] * q.col(static_cast<Eigen::Index>(active[i]));
  return x;
}

}  // namespace

std::vector<double> nearest_in_hull(const std::vector<std::vector<double>>& points,
                                    const std::vector<double>& target) {
  if (points.empty()) throw std::invalid_argument("nearest_in_hull: no points");
  const auto dim = static_cast<Eigen::Index>(target.size());
  const auto n = static_cast<Eigen::Index>(points.size());

  Eigen::MatrixXd q(dim, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (static_cast<Eigen::Index>(points[j].size()) != dim) {
      throw std::invalid_argument("nearest_in_hull: dimension mismatch");
    }
    for (Eigen::Index i = 0; i < dim; ++i) q(i, j) = points[j][i] - target[i];
  }

  double scale = 0.0;
  Eigen::Index start = 0;
  double best_norm = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    double norm = q.col(j).squaredNorm();
    scale = std::max(scale, norm);
    if (norm < best_norm) {
      best_norm = norm;
      start = j;
    }
  }

  std::vector<std::size_t> active{static_cast<std::size_t>(start)};
  std::vector<double> lambda{1.0};
  Eigen::VectorXd x = q.col(start);

  for (int iter = 0; iter < kMaxMajorIterations; ++iter) {
    Eigen::VectorXd scores = q.transpose() * x;
    Eigen::Index entering = 0;
    scores.minCoeff(&entering);
    if (x.squaredNorm() - scores(entering) <= 1e-13 * std::max(scale, 1e-300)) break;
    if (std::find(active.begin(), active.end(), static_cast<std::size_t>(entering)) != active.end()) break;
    active.push_back(static_cast<std::size_t>(entering));
    lambda.push_back(0.0);

    while (true) {
      Eigen::VectorXd alpha = affine_minimizer(q, active);
      if (alpha.minCoeff() > kWeightEps) {
        for (std::size_t i = 0; i < active.size(); ++i) lambda[i] = alpha(static_cast<Eigen::Index>(i));
        x = combine(q, active, lambda);
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < active.size(); ++i) {
        double a = alpha(static_cast<Eigen::Index>(i));
        if (a <= kWeightEps) theta = std::min(theta, lambda[i] / (lambda[i] - a));
      }
      for (std::size_t i = 0; i < active.size(); ++i) {
        lambda[i] = theta * alpha(static_cast<Eigen::Index>(i)) + (1.0 - theta) * lambda[i];
      }
      std::vector<std::size_t> kept;
      std::vector<double> kept_weights;
      for (std::size_t i = 0; i < active.size(); ++i) {
        if (lambda[i] > kWeightEps) {
          kept.push_back(active[i]);
          kept_weights.push_back(lambda[i]);
        }
      }
      if (kept.size() == active.size()) {
        // Numerically stuck; drop the smallest weight.
        auto smallest = std::min_element(kept_weights.begin(), kept_weights.end()) - kept_weights.begin();
        kept.erase(kept.begin() + smallest);
        kept_weights.erase(kept_weights.begin() + smallest);
      }
      double total = 0.0;
      for (double w : kept_weights) total += w;
      for (double& w : kept_weights) w /= total;
      active = std::move(kept);
      lambda = std::move(kept_weights);
      x = combine(q, active, lambda);
      if (active.size() == 1) break;
    }
  }

  std::vector<double> result(static_cast<std::size_t>(dim), 0.0);
  for (std::size_t i = 0; i < active.size(); ++i) {
    const auto& pt = points[active[i]];
    for (std::size_t d = 0; d < result.size(); ++d) result[d] += lambda[i] * pt[d];
  }
  return result;
}

}  // namespace fairbandit::detail
