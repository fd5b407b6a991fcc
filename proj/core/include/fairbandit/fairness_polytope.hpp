#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairbandit/rational.hpp"

namespace fairbandit {

/// Vertex enumeration refuses polytopes with more arms than this by default.
inline constexpr std::size_t kDefaultVertexArmCap = 12;

/// Tolerance used for floating-point containment checks throughout.
inline constexpr double kFeasibilityTol = 1e-9;

/// Arms {0..k-1} and the content groups G_1..G_g over them. Groups need not
/// cover every arm and may overlap.
class GroupStructure {
 public:
  GroupStructure() = default;

  /// Throws std::invalid_argument when k == 0, a group is empty, an index is
  /// out of range, or a group lists the same arm twice. Groups are stored
  /// sorted.
  GroupStructure(std::size_t arms, std::vector<std::vector<std::size_t>> groups);

  std::size_t arms() const noexcept { return arms_; }
  std::size_t group_count() const noexcept { return groups_.size(); }
  const std::vector<std::vector<std::size_t>>& groups() const noexcept { return groups_; }
  const std::vector<std::size_t>& group(std::size_t i) const { return groups_.at(i); }

  /// Indices of the groups containing `arm` (the set T_a).
  std::vector<std::size_t> memberships(std::size_t arm) const;

  /// Probability mass a distribution puts on group i.
  double mass(std::size_t i, std::span<const double> p) const;
  Rational mass(std::size_t i, const RationalVector& p) const;

 private:
  std::size_t arms_ = 0;
  std::vector<std::vector<std::size_t>> groups_;
};

/// Max over arms of the number of groups containing the arm; 0 with no groups.
std::size_t overlap_degree(const GroupStructure& structure);

/// Per-group lower/upper mass bounds with 0 <= lower_i <= upper_i <= 1.
class FairnessBounds {
 public:
  FairnessBounds() = default;

  /// Throws std::invalid_argument on length mismatch or a violated ordering.
  FairnessBounds(RationalVector lower, RationalVector upper);

  const RationalVector& lower() const noexcept { return lower_; }
  const RationalVector& upper() const noexcept { return upper_; }
  std::size_t size() const noexcept { return lower_.size(); }

  /// Least common denominator N of all bounds.
  Integer common_denominator() const;

 private:
  RationalVector lower_;
  RationalVector upper_;
};

/// The fairness polytope C = { p in simplex : lower_i <= sum_{a in G_i} p_a <= upper_i }.
///
/// Immutable value type. The vertex list is computed lazily on first request
/// and shared between copies; the computation is guarded so concurrent
/// readers are safe.
class FairPolytope {
 public:
  FairPolytope(GroupStructure structure, FairnessBounds bounds,
               std::size_t vertex_arm_cap = kDefaultVertexArmCap);

  const GroupStructure& structure() const noexcept { return structure_; }
  const FairnessBounds& bounds() const noexcept { return bounds_; }
  std::size_t arms() const noexcept { return structure_.arms(); }
  std::size_t vertex_arm_cap() const noexcept { return vertex_arm_cap_; }

  /// Vertices in lexicographic order. Throws CapacityError above the arm cap.
  const std::vector<RationalVector>& vertices() const;
  /// The same vertices converted to double once.
  const std::vector<std::vector<double>>& float_vertices() const;

 private:
  struct Cache;

  GroupStructure structure_;
  FairnessBounds bounds_;
  std::size_t vertex_arm_cap_;
  std::shared_ptr<Cache> cache_;
};

/// Throws std::invalid_argument when the bounds do not have one entry per group.
FairPolytope build_polytope(GroupStructure structure, FairnessBounds bounds);

bool check_feasibility(const FairPolytope& polytope);

/// Tolerant membership test for floating-point distributions.
bool contains(const FairPolytope& polytope, std::span<const double> p, double tol);

/// Exact membership test.
bool contains(const FairPolytope& polytope, const RationalVector& p);

/// Largest amount by which `p` breaks any constraint of C (0 when inside).
double max_violation(const FairPolytope& polytope, std::span<const double> p);

/// V(C), lexicographically sorted and duplicate-free; empty iff C is empty.
std::vector<RationalVector> enumerate_vertices(const FairPolytope& polytope);

struct LinearOptimum {
  RationalVector vertex;
  Rational value;
};

/// Maximizes <weights, p> over C. Ties go to the lexicographically smallest
/// vertex. Throws InfeasibleError on an empty polytope.
LinearOptimum maximize_linear(const FairPolytope& polytope, const RationalVector& weights);

/// Floating-point variant over the cached vertex list; returns the vertex
/// index into `float_vertices()`. Values within 1e-12 (relative) are treated
/// as ties.
std::size_t maximize_linear_index(const FairPolytope& polytope, std::span<const double> weights);

/// Gap between the best and second-best vertex value.
struct GammaResult {
  Rational gamma;
  RationalVector best_vertex;
  std::optional<RationalVector> second_best_vertex;
  bool degenerate = false;

  /// True when C has a single vertex; gamma is then +infinity by convention.
  bool infinite() const noexcept { return !second_best_vertex.has_value(); }
  /// "inf" for single-vertex polytopes, otherwise the exact rational.
  std::string gamma_string() const;
};

GammaResult compute_gamma(const FairPolytope& polytope, const RationalVector& means);

/// 1/(MN) when the groups are disjoint, 1/(D^g M N) otherwise. Holds for
/// non-degenerate gaps when means are M_a/M and bounds are L_i/N, U_i/N.
Rational gamma_lower_bound(const GroupStructure& structure, const Integer& mean_denominator,
                           const Integer& bound_denominator);

/// Euclidean projection of the uniform distribution onto C (exact when the
/// uniform distribution is already feasible). Throws InfeasibleError.
std::vector<double> most_uniform_fair(const FairPolytope& polytope);

/// Random upward shift of every bound numerator by up to magnitude * N' over
/// a refined common denominator N', clamped to keep 0 <= lower <= upper <= 1.
/// Deterministic for a given seed; magnitude 0 returns the input.
FairnessBounds perturb_bounds(const FairnessBounds& bounds, const Rational& magnitude,
                              std::uint64_t seed);

}  // namespace fairbandit
