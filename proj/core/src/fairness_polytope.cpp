#include "fairbandit/fairness_polytope.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <set>
#include <stdexcept>

#include <boost/random/uniform_int_distribution.hpp>

#include "fairbandit/errors.hpp"
#include "min_norm_point.hpp"

namespace fairbandit {

// ---------------------------------------------------------------------------
// GroupStructure / FairnessBounds

GroupStructure::GroupStructure(std::size_t arms, std::vector<std::vector<std::size_t>> groups)
    : arms_(arms), groups_(std::move(groups)) {
  if (arms_ == 0) throw std::invalid_argument("group structure needs at least one arm");
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    auto& g = groups_[i];
    if (g.empty()) throw std::invalid_argument("group " + std::to_string(i) + " is empty");
    std::sort(g.begin(), g.end());
    if (std::adjacent_find(g.begin(), g.end()) != g.end()) {
      throw std::invalid_argument("group " + std::to_string(i) + " lists an arm twice");
    }
    if (g.back() >= arms_) {
      throw std::invalid_argument("group " + std::to_string(i) + " references arm " +
                                  std::to_string(g.back()) + " >= k");
    }
  }
}

std::vector<std::size_t> GroupStructure::memberships(std::size_t arm) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (std::binary_search(groups_[i].begin(), groups_[i].end(), arm)) out.push_back(i);
  }
  return out;
}

double GroupStructure::mass(std::size_t i, std::span<const double> p) const {
  double total = 0.0;
  for (std::size_t a : groups_.at(i)) total += p[a];
  return total;
}

Rational GroupStructure::mass(std::size_t i, const RationalVector& p) const {
  Rational total = 0;
  for (std::size_t a : groups_.at(i)) total += p[a];
  return total;
}

std::size_t overlap_degree(const GroupStructure& structure) {
  std::vector<std::size_t> counts(structure.arms(), 0);
  for (const auto& g : structure.groups()) {
    for (std::size_t a : g) ++counts[a];
  }
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

FairnessBounds::FairnessBounds(RationalVector lower, RationalVector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw std::invalid_argument("lower and upper bound lists differ in length");
  }
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (lower_[i] < 0 || upper_[i] > 1 || lower_[i] > upper_[i]) {
      throw std::invalid_argument("bounds for group " + std::to_string(i) +
                                  " must satisfy 0 <= lower <= upper <= 1 (got " +
                                  to_string(lower_[i]) + ", " + to_string(upper_[i]) + ")");
    }
  }
}

Integer FairnessBounds::common_denominator() const {
  RationalVector all = lower_;
  all.insert(all.end(), upper_.begin(), upper_.end());
  return fairbandit::common_denominator(all);
}

// ---------------------------------------------------------------------------
// Vertex enumeration

namespace {

struct ConstraintRow {
  std::vector<int> coeffs;
  Rational rhs;
};

struct ReducedRow {
  RationalVector coeffs;
  Rational rhs;
  std::size_t pivot = 0;
};

// Equality row first, then nonnegativity rows, then group bound rows. Equal
// lower/upper bounds contribute a single row.
std::vector<ConstraintRow> constraint_rows(const GroupStructure& structure, const FairnessBounds& bounds) {
  const std::size_t k = structure.arms();
  std::vector<ConstraintRow> rows;
  rows.push_back({std::vector<int>(k, 1), Rational(1)});
  for (std::size_t a = 0; a < k; ++a) {
    std::vector<int> e(k, 0);
    e[a] = 1;
    rows.push_back({std::move(e), Rational(0)});
  }
  for (std::size_t i = 0; i < structure.group_count(); ++i) {
    std::vector<int> indicator(k, 0);
    for (std::size_t a : structure.group(i)) indicator[a] = 1;
    rows.push_back({indicator, bounds.lower()[i]});
    if (bounds.upper()[i] != bounds.lower()[i]) rows.push_back({indicator, bounds.upper()[i]});
  }
  return rows;
}

// Reduces `row` against the current echelon rows; nullopt if it is dependent.
std::optional<ReducedRow> reduce(const ConstraintRow& row, const std::vector<ReducedRow>& basis) {
  ReducedRow r;
  r.coeffs.reserve(row.coeffs.size());
  for (int c : row.coeffs) r.coeffs.emplace_back(c);
  r.rhs = row.rhs;
  for (const auto& b : basis) {
    const Rational factor = r.coeffs[b.pivot];
    if (factor == 0) continue;
    for (std::size_t c = 0; c < r.coeffs.size(); ++c) {
      if (b.coeffs[c] != 0) r.coeffs[c] -= factor * b.coeffs[c];
    }
    r.rhs -= factor * b.rhs;
  }
  for (std::size_t c = 0; c < r.coeffs.size(); ++c) {
    if (r.coeffs[c] != 0) {
      const Rational lead = r.coeffs[c];
      for (auto& v : r.coeffs) v /= lead;
      r.rhs /= lead;
      r.pivot = c;
      return r;
    }
  }
  return std::nullopt;
}

RationalVector back_substitute(const std::vector<ReducedRow>& basis, std::size_t k) {
  RationalVector x(k, Rational(0));
  for (auto it = basis.rbegin(); it != basis.rend(); ++it) {
    Rational value = it->rhs;
    for (std::size_t c = 0; c < k; ++c) {
      if (c != it->pivot && it->coeffs[c] != 0) value -= it->coeffs[c] * x[c];
    }
    x[it->pivot] = value;
  }
  return x;
}

class VertexSearch {
 public:
  VertexSearch(const FairPolytope& polytope)
      : polytope_(polytope), rows_(constraint_rows(polytope.structure(), polytope.bounds())) {}

  std::vector<RationalVector> run() {
    const std::size_t k = polytope_.arms();
    std::vector<ReducedRow> basis;
    basis.push_back(*reduce(rows_.front(), basis));
    descend(1, basis, k);
    return {found_.begin(), found_.end()};
  }

 private:
  void descend(std::size_t next, std::vector<ReducedRow>& basis, std::size_t k) {
    if (basis.size() == k) {
      RationalVector x = back_substitute(basis, k);
      if (contains(polytope_, x)) found_.insert(std::move(x));
      return;
    }
    const std::size_t needed = k - basis.size();
    for (std::size_t r = next; r + needed <= rows_.size(); ++r) {
      auto reduced = reduce(rows_[r], basis);
      if (!reduced) continue;
      basis.push_back(std::move(*reduced));
      descend(r + 1, basis, k);
      basis.pop_back();
    }
  }

  const FairPolytope& polytope_;
  std::vector<ConstraintRow> rows_;
  std::set<RationalVector> found_;
};

}  // namespace

struct FairPolytope::Cache {
  std::once_flag once;
  std::vector<RationalVector> vertices;
  std::vector<std::vector<double>> float_vertices;
};

FairPolytope::FairPolytope(GroupStructure structure, FairnessBounds bounds, std::size_t vertex_arm_cap)
    : structure_(std::move(structure)),
      bounds_(std::move(bounds)),
      vertex_arm_cap_(vertex_arm_cap),
      cache_(std::make_shared<Cache>()) {
  if (bounds_.size() != structure_.group_count()) {
    throw std::invalid_argument("expected " + std::to_string(structure_.group_count()) +
                                " bound pairs, got " + std::to_string(bounds_.size()));
  }
}

const std::vector<RationalVector>& FairPolytope::vertices() const {
  if (arms() > vertex_arm_cap_) {
    throw CapacityError("vertex enumeration is capped at k = " + std::to_string(vertex_arm_cap_) +
                        " arms (got " + std::to_string(arms()) + ")");
  }
  std::call_once(cache_->once, [this] {
    cache_->vertices = VertexSearch(*this).run();
    cache_->float_vertices.reserve(cache_->vertices.size());
    for (const auto& v : cache_->vertices) cache_->float_vertices.push_back(to_doubles(v));
  });
  return cache_->vertices;
}

const std::vector<std::vector<double>>& FairPolytope::float_vertices() const {
  vertices();
  return cache_->float_vertices;
}

FairPolytope build_polytope(GroupStructure structure, FairnessBounds bounds) {
  return FairPolytope(std::move(structure), std::move(bounds));
}

bool check_feasibility(const FairPolytope& polytope) { return !polytope.vertices().empty(); }

bool contains(const FairPolytope& polytope, std::span<const double> p, double tol) {
  if (tol < 0) throw std::invalid_argument("contains: negative tolerance");
  if (p.size() != polytope.arms()) throw std::invalid_argument("contains: wrong dimension");
  double sum = 0.0;
  for (double v : p) {
    if (v < -tol) return false;
    sum += v;
  }
  if (sum < 1.0 - tol || sum > 1.0 + tol) return false;
  const auto& s = polytope.structure();
  const auto& b = polytope.bounds();
  for (std::size_t i = 0; i < s.group_count(); ++i) {
    const double mass = s.mass(i, p);
    if (mass < to_double(b.lower()[i]) - tol || mass > to_double(b.upper()[i]) + tol) return false;
  }
  return true;
}

bool contains(const FairPolytope& polytope, const RationalVector& p) {
  if (p.size() != polytope.arms()) throw std::invalid_argument("contains: wrong dimension");
  Rational sum = 0;
  for (const auto& v : p) {
    if (v < 0) return false;
    sum += v;
  }
  if (sum != 1) return false;
  const auto& s = polytope.structure();
  const auto& b = polytope.bounds();
  for (std::size_t i = 0; i < s.group_count(); ++i) {
    const Rational mass = s.mass(i, p);
    if (mass < b.lower()[i] || mass > b.upper()[i]) return false;
  }
  return true;
}

double max_violation(const FairPolytope& polytope, std::span<const double> p) {
  if (p.size() != polytope.arms()) throw std::invalid_argument("max_violation: wrong dimension");
  double worst = 0.0;
  double sum = 0.0;
  for (double v : p) {
    worst = std::max(worst, -v);
    sum += v;
  }
  worst = std::max(worst, std::abs(sum - 1.0));
  const auto& s = polytope.structure();
  const auto& b = polytope.bounds();
  for (std::size_t i = 0; i < s.group_count(); ++i) {
    const double mass = s.mass(i, p);
    worst = std::max(worst, to_double(b.lower()[i]) - mass);
    worst = std::max(worst, mass - to_double(b.upper()[i]));
  }
  return worst;
}

std::vector<RationalVector> enumerate_vertices(const FairPolytope& polytope) { return polytope.vertices(); }

LinearOptimum maximize_linear(const FairPolytope& polytope, const RationalVector& weights) {
  if (weights.size() != polytope.arms()) throw std::invalid_argument("maximize_linear: wrong dimension");
  const auto& vertices = polytope.vertices();
  if (vertices.empty()) throw InfeasibleError("fairness polytope is empty");
  std::size_t best = 0;
  Rational best_value = dot(weights, vertices[0]);
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    Rational value = dot(weights, vertices[i]);
    if (value > best_value) {
      best_value = std::move(value);
      best = i;
    }
  }
  return {vertices[best], best_value};
}

std::size_t maximize_linear_index(const FairPolytope& polytope, std::span<const double> weights) {
  if (weights.size() != polytope.arms()) throw std::invalid_argument("maximize_linear: wrong dimension");
  const auto& vertices = polytope.float_vertices();
  if (vertices.empty()) throw InfeasibleError("fairness polytope is empty");
  auto value_of = [&](const std::vector<double>& v) {
    double total = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) total += weights[a] * v[a];
    return total;
  };
  std::size_t best = 0;
  double best_value = value_of(vertices[0]);
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const double value = value_of(vertices[i]);
    if (value > best_value + 1e-12 * std::max(1.0, std::abs(best_value))) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

std::string GammaResult::gamma_string() const { return infinite() ? "inf" : to_string(gamma); }

GammaResult compute_gamma(const FairPolytope& polytope, const RationalVector& means) {
  if (means.size() != polytope.arms()) throw std::invalid_argument("compute_gamma: wrong dimension");
  const auto& vertices = polytope.vertices();
  if (vertices.empty()) throw InfeasibleError("fairness polytope is empty");

  std::vector<Rational> values;
  values.reserve(vertices.size());
  for (const auto& v : vertices) values.push_back(dot(means, v));

  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  GammaResult result;
  result.best_vertex = vertices[best];
  if (vertices.size() == 1) return result;

  std::optional<std::size_t> second;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i == best) continue;
    if (!second || values[i] > values[*second]) second = i;
  }
  result.second_best_vertex = vertices[*second];
  result.gamma = values[best] - values[*second];
  result.degenerate = result.gamma == 0;
  return result;
}

Rational gamma_lower_bound(const GroupStructure& structure, const Integer& mean_denominator,
                           const Integer& bound_denominator) {
  if (mean_denominator <= 0 || bound_denominator <= 0) {
    throw std::invalid_argument("gamma_lower_bound: denominators must be positive");
  }
  const std::size_t d = overlap_degree(structure);
  Integer denominator = mean_denominator * bound_denominator;
  if (d > 1) {
    denominator *= boost::multiprecision::pow(Integer(d), static_cast<unsigned>(structure.group_count()));
  }
  return Rational(Integer(1), denominator);
}

std::vector<double> most_uniform_fair(const FairPolytope& polytope) {
  const auto& vertices = polytope.float_vertices();
  if (vertices.empty()) throw InfeasibleError("fairness polytope is empty");
  const std::size_t k = polytope.arms();
  const Rational share(Integer(1), Integer(k));
  if (contains(polytope, RationalVector(k, share))) return std::vector<double>(k, 1.0 / static_cast<double>(k));
  return detail::nearest_in_hull(vertices, std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

FairnessBounds perturb_bounds(const FairnessBounds& bounds, const Rational& magnitude, std::uint64_t seed) {
  if (magnitude < 0) throw std::invalid_argument("perturb_bounds: negative magnitude");
  if (magnitude == 0) return bounds;

  constexpr int kRefinement = 100;
  Integer refined = bounds.common_denominator();
  const Integer mag_den = denominator(magnitude);
  refined = refined / boost::multiprecision::gcd(refined, mag_den) * mag_den * kRefinement;
  const Integer max_offset = numerator(Rational(magnitude * refined));
  if (max_offset > std::numeric_limits<std::int64_t>::max()) {
    throw std::invalid_argument("perturb_bounds: magnitude too large");
  }

  std::mt19937_64 engine(seed);
  boost::random::uniform_int_distribution<std::int64_t> offset(0, max_offset.convert_to<std::int64_t>());
  const Rational step(Integer(1), refined);

  RationalVector lower;
  RationalVector upper;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    Rational lo = bounds.lower()[i] + step * offset(engine);
    Rational hi = bounds.upper()[i] + step * offset(engine);
    if (hi > 1) hi = 1;
    if (lo > hi) lo = hi;
    lower.push_back(std::move(lo));
    upper.push_back(std::move(hi));
  }
  return FairnessBounds(std::move(lower), std::move(upper));
}

}  // namespace fairbandit
