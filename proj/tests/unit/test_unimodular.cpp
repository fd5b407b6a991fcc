#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "fairbandit/errors.hpp"
#include "fairbandit/unimodular.hpp"
#include "oracles.hpp"

using namespace fairbandit;

TEST_CASE("determinant agrees with cofactor expansion") {
  CHECK(determinant({}) == 1);
  CHECK(determinant({{5}}) == 5);
  CHECK(determinant({{0, 1}, {1, 0}}) == -1);
  CHECK(determinant({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}) == 2);
  CHECK_THROWS_AS(determinant({{1, 2}}), std::invalid_argument);

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> entry(-3, 3);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    IntMatrix m(n, std::vector<std::int64_t>(n));
    std::vector<RationalVector> r(n, RationalVector(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        m[i][j] = entry(rng);
        r[i][j] = m[i][j];
      }
    }
    CHECK(Rational(determinant(m)) == oracle::cofactor_det(r));
  }
}

TEST_CASE("constraint matrix layout") {
  const auto m = constraint_matrix(GroupStructure(3, {{0, 2}}));
  const IntMatrix expected{{1, 1, 1}, {1, 0, 1}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(m == expected);
}

TEST_CASE("known totally unimodular and non-unimodular matrices") {
  CHECK(is_totally_unimodular({{1, 1, 0}, {0, 1, 1}}));
  CHECK(is_totally_unimodular({{1, -1}, {1, 1}}) == false);
  CHECK_FALSE(is_totally_unimodular({{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}));
  CHECK_FALSE(is_totally_unimodular({{2}}));
  CHECK(is_totally_unimodular({}));

  // Odd cycle of overlapping groups.
  const auto cycle = constraint_matrix(GroupStructure(3, {{0, 1}, {1, 2}, {0, 2}}));
  CHECK_FALSE(is_totally_unimodular(cycle));
  // A chain of overlapping intervals keeps the consecutive-ones property.
  const auto chain = constraint_matrix(GroupStructure(3, {{0, 1}, {1, 2}}));
  CHECK(is_totally_unimodular(chain));
}

TEST_CASE("limits and malformed input") {
  const IntMatrix tall(9, std::vector<std::int64_t>(2, 0));
  CHECK_THROWS_AS(is_totally_unimodular(tall), CapacityError);
  CHECK(is_totally_unimodular(tall, {9, 2}));
  CHECK_THROWS_AS(is_totally_unimodular({{1, 0}, {1}}), std::invalid_argument);
}

TEST_CASE("disjoint groups always give a totally unimodular matrix") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t k = 2 + rng() % 4;
    const std::size_t g = 1 + rng() % 3;
    std::vector<std::vector<std::size_t>> groups(g);
    for (std::size_t a = 0; a < k; ++a) {
      const auto label = rng() % (g + 1);
      if (label < g) groups[label].push_back(a);
    }
    std::erase_if(groups, [](const auto& grp) { return grp.empty(); });
    const auto m = constraint_matrix(GroupStructure(k, groups));
    CHECK(is_totally_unimodular(m, {m.size(), k}));
  }
}
