#include <benchmark/benchmark.h>

#include <cmath>

#include "reebflow/flowable_pair.hpp"
#include "reebflow/matching.hpp"

using namespace reebflow;

static void BM_SolveWitness(benchmark::State& state) {
  const ReebHomeo f = ReebHomeo::counterexample();
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        solve_witness(f, k, BoundaryPoint::on_delta(0.8), BoundaryPoint::on_delta_prime(1.3), 1e-12));
}
BENCHMARK(BM_SolveWitness)->Arg(8)->Arg(32)->Arg(128);

static void BM_Alpha(benchmark::State& state) {
  const ReebHomeo f = ReebHomeo::counterexample();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        alpha(f, BoundaryPoint::on_delta(0.8), BoundaryPoint::on_delta_prime(1.3), BoundaryPoint::on_delta(1.1)));
}
BENCHMARK(BM_Alpha);

static void BM_FourPointGrid(benchmark::State& state) {
  const ReebHomeo f = ReebHomeo::counterexample();
  const auto grid = default_four_point_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(check_four_point(f, grid));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}
BENCHMARK(BM_FourPointGrid)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_SqrtPoint(benchmark::State& state) {
  const EquivClassMap rel = cubic_relation();
  double x = -2.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sqrt_point(rel, x, std::cbrt(x * x * x + 1.0)));
    x = x > 2.0 ? -2.0 : x + 0.01;
  }
}
BENCHMARK(BM_SqrtPoint);

static void BM_CubicFlow(benchmark::State& state) {
  const HalvingSequence hs(cubic_pair(), 40);
  for (auto _ : state) benchmark::DoNotOptimize(hs.flow(0.3, 1.2));
}
BENCHMARK(BM_CubicFlow)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
