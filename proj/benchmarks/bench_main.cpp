#include <benchmark/benchmark.h>

#include <algorithm>
#include <memory>

#include "fairbandit/fairness_polytope.hpp"
#include "fairbandit/policies.hpp"
#include "fairbandit/unimodular.hpp"

using namespace fairbandit;

namespace {

// k arms split into pairs, each pair holding between 1/(2g) and min(1, 3/(2g)) of the mass.
FairPolytope paired(std::size_t k) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t a = 0; a + 1 < k; a += 2) groups.push_back({a, a + 1});
  const auto g = static_cast<long long>(groups.size());
  return build_polytope(GroupStructure(k, groups),
                        FairnessBounds(RationalVector(groups.size(), Rational(1, 2 * g)),
                                       RationalVector(groups.size(), std::min(Rational(1), Rational(3, 2 * g)))));
}

void BM_EnumerateVertices(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto p = paired(k);
    benchmark::DoNotOptimize(enumerate_vertices(p));
  }
}
BENCHMARK(BM_EnumerateVertices)->DenseRange(4, 10, 2)->Unit(benchmark::kMicrosecond);

void BM_PolicyStep(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  auto polytope = std::make_shared<const FairPolytope>(paired(k));
  polytope->vertices();
  Policy policy(PolicyKind::FairUCB, polytope, {}, 1);
  std::mt19937_64 rng(2);
  std::bernoulli_distribution coin(0.5);
  for (auto _ : state) {
    auto p = policy.select_distribution();
    const auto arm = policy.sample_arm(p);
    policy.update(arm, coin(rng) ? 1.0 : 0.0);
  }
}
BENCHMARK(BM_PolicyStep)->DenseRange(4, 12, 4);

void BM_TotallyUnimodular(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto matrix = constraint_matrix(paired(k).structure());
  const UnimodularityLimits limits{matrix.size(), k};
  for (auto _ : state) benchmark::DoNotOptimize(is_totally_unimodular(matrix, limits));
}
BENCHMARK(BM_TotallyUnimodular)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
