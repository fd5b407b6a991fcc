#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fairbandit/fairness_polytope.hpp"

namespace fairbandit {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

struct UnimodularityLimits {
  std::size_t max_rows = 8;
  std::size_t max_cols = 8;
};

/// True iff every square submatrix has determinant in {-1, 0, 1}. Brute force
/// over all square submatrices; throws CapacityError when the matrix exceeds
/// `limits` and std::invalid_argument for ragged rows.
bool is_totally_unimodular(const IntMatrix& matrix, UnimodularityLimits limits = {});

/// Exact determinant of a square integer matrix (fraction-free elimination).
std::int64_t determinant(const IntMatrix& matrix);

/// Constraint matrix whose rows define the vertices of the fairness polytope:
/// the all-ones simplex row, one indicator row per group, then the k identity
/// rows of the nonnegativity constraints.
IntMatrix constraint_matrix(const GroupStructure& structure);

}  // namespace fairbandit
