#include <algorithm>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "lnport/crra.hpp"
#include "lnport/frontier.hpp"
#include "lnport/lognormal.hpp"
#include "lnport/oracle.hpp"
#include "lnport/stats.hpp"

namespace {

using namespace lnport;

void BM_EfficientConstants(benchmark::State& state) {
  const MarketParams p = random_market(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(efficient_constants(p));
}
BENCHMARK(BM_EfficientConstants)->Arg(4)->Arg(17)->Arg(100);

void BM_PowerSolution(benchmark::State& state) {
  const MarketParams p = random_market(static_cast<std::size_t>(state.range(0)), 1);
  const FrontierConstants c = efficient_constants(p);
  const double gamma = std::max(5.0, gamma_min(c) + 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(power_solution(gamma, p, c));
}
BENCHMARK(BM_PowerSolution)->Arg(4)->Arg(17)->Arg(100);

void BM_Oracle(benchmark::State& state) {
  const MarketParams p = random_market(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(maximize_numeric(p, 5.0));
}
BENCHMARK(BM_Oracle)->Arg(2)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_ShapiroWilk(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(shapiro_wilk(x));
}
BENCHMARK(BM_ShapiroWilk)->Arg(50)->Arg(157)->Arg(1000)->Arg(5000);

void BM_PsiSupEmpirical(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(psi_sup_empirical(1.0, 0.1, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_PsiSupEmpirical)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
