#include "fairbandit/unimodular.hpp"

#include <stdexcept>
#include <string>
#include <utility>

#include "fairbandit/errors.hpp"

namespace fairbandit {
namespace {

// Calls visit(subset) for every size-r subset of {0..n-1} in lexicographic order.
template <typename Visit>
void for_each_subset(std::size_t n, std::size_t r, Visit&& visit) {
  if (r > n) return;
  std::vector<std::size_t> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  while (true) {
    visit(idx);
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == n - r + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::int64_t determinant(const IntMatrix& matrix) {
  const std::size_t n = matrix.size();
  if (n == 0) return 1;
  IntMatrix m = matrix;
  for (const auto& row : m) {
    if (row.size() != n) throw std::invalid_argument("determinant: matrix is not square");
  }
  // Bareiss: every intermediate entry is a minor of the input, so it is exact.
  std::int64_t sign = 1;
  std::int64_t prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

bool is_totally_unimodular(const IntMatrix& matrix, UnimodularityLimits limits) {
  const std::size_t rows = matrix.size();
  const std::size_t cols = rows == 0 ? 0 : matrix.front().size();
  for (const auto& row : matrix) {
    if (row.size() != cols) throw std::invalid_argument("is_totally_unimodular: ragged matrix");
  }
  if (rows > limits.max_rows || cols > limits.max_cols) {
    throw CapacityError("total unimodularity check is capped at " + std::to_string(limits.max_rows) + "x" +
                        std::to_string(limits.max_cols) + " (got " + std::to_string(rows) + "x" +
                        std::to_string(cols) + ")");
  }
  for (const auto& row : matrix) {
    for (auto v : row) {
      if (v < -1 || v > 1) return false;
    }
  }

  bool ok = true;
  IntMatrix sub;
  for (std::size_t size = 2; ok && size <= std::min(rows, cols); ++size) {
    sub.assign(size, std::vector<std::int64_t>(size));
    for_each_subset(rows, size, [&](const std::vector<std::size_t>& r) {
      if (!ok) return;
      for_each_subset(cols, size, [&](const std::vector<std::size_t>& c) {
        if (!ok) return;
        for (std::size_t i = 0; i < size; ++i) {
          for (std::size_t j = 0; j < size; ++j) sub[i][j] = matrix[r[i]][c[j]];
        }
        const auto det = determinant(sub);
        if (det < -1 || det > 1) ok = false;
      });
    });
  }
  return ok;
}

IntMatrix constraint_matrix(const GroupStructure& structure) {
  const std::size_t k = structure.arms();
  IntMatrix m;
  m.emplace_back(k, 1);
  for (const auto& g : structure.groups()) {
    std::vector<std::int64_t> row(k, 0);
    for (std::size_t a : g) row[a] = 1;
    m.push_back(std::move(row));
  }
  for (std::size_t a = 0; a < k; ++a) {
    std::vector<std::int64_t> row(k, 0);
    row[a] = 1;
    m.push_back(std::move(row));
  }
  return m;
}

}  // namespace fairbandit
