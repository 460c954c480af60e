#include <benchmark/benchmark.h>

#include "ergolab/pressure.hpp"
#include "ergolab/transfer.hpp"

using namespace ergolab;

static void BM_ShiftCaratheodory(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  Potential phi = shift_coboundary(2, 3, {0.1, -0.4, 0.3, 0.0, 0.7, -0.2, 0.5, -0.6});
  for (auto _ : state) {
    benchmark::DoNotOptimize(caratheodory_log_m(2, phi, LambdaSpec::whole(), 1, 0.7, n_max));
  }
}
BENCHMARK(BM_ShiftCaratheodory)->Arg(12)->Arg(24)->Arg(48);

static void BM_SeparatedSet(benchmark::State& state) {
  auto m = MapSystem::circle_times_d(2);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto s = build_separated(m, n, 0.01, 1 << 18);
    benchmark::DoNotOptimize(s.points.data());
  }
}
BENCHMARK(BM_SeparatedSet)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_SeparatedSetViana(benchmark::State& state) {
  auto m = MapSystem::viana(16, misiurewicz_a0(), 0.01);
  for (auto _ : state) {
    auto s = build_separated(m, 2, 0.05, 512, 128);
    benchmark::DoNotOptimize(s.points.data());
  }
}
BENCHMARK(BM_SeparatedSetViana)->Unit(benchmark::kMillisecond);

static void BM_UlamExact(benchmark::State& state) {
  auto m = MapSystem::circle_times_d(3);
  Potential phi = Potential::analytic(AnalyticFamily::CosTheta, 0.2);
  Grid g = Grid::for_map(m, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_ulam(m, g, phi).val.data());
}
BENCHMARK(BM_UlamExact)->Arg(1 << 10)->Arg(1 << 14)->Unit(benchmark::kMillisecond);

static void BM_UlamMonteCarloViana(benchmark::State& state) {
  auto m = MapSystem::viana(16, misiurewicz_a0(), 0.01);
  Grid g = Grid::for_map(m, 128, 128);
  for (auto _ : state) benchmark::DoNotOptimize(build_ulam(m, g, Potential(), UlamMode::monte_carlo(1, 16)).val.data());
}
BENCHMARK(BM_UlamMonteCarloViana)->Unit(benchmark::kMillisecond);

static void BM_PowerIteration(benchmark::State& state) {
  auto m = MapSystem::quadratic(1.9);
  auto op = build_ulam(m, Grid::for_map(m, 4096), Potential());
  for (auto _ : state) benchmark::DoNotOptimize(power_iterate(op, 1e-10, 100000).lambda);
}
BENCHMARK(BM_PowerIteration)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
