// SPDX-License-Identifier: Apache-2.0
// Serial reference vs OpenMP sweep over the full benchmark grid.

#include <benchmark/benchmark.h>

#include "partsim/scenarios/sweep.hpp"

namespace {

using namespace partsim;

std::vector<RunSpec> grid(std::uint64_t iterations) {
  RunSpec base;
  base.params.iterations = iterations;
  return sweep_grid(base, kAllBenchmarks, kAllScenarios, kAllIrqChips);
}

void BM_SweepSerial(benchmark::State& state) {
  const auto specs = grid(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(specs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(specs.size()));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto specs = grid(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_parallel(specs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(specs.size()));
}

void BM_SingleRun(benchmark::State& state) {
  RunSpec spec;
  spec.benchmark = static_cast<BenchmarkKind>(state.range(0));
  spec.params.iterations = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(run(spec));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SingleRun)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
