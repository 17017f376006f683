// SPDX-License-Identifier: Apache-2.0
#include "partsim/scenarios/sweep.hpp"

#include <exception>

#include <omp.h>

namespace partsim {

std::vector<RunSpec> sweep_grid(const RunSpec& base, std::span<const BenchmarkKind> benchmarks,
                                std::span<const Scenario> scenarios, std::span<const IrqChip> irqchips) {
  std::vector<RunSpec> out;
  for (BenchmarkKind b : benchmarks) {
    for (Scenario s : scenarios) {
      for (IrqChip c : irqchips) {
        RunSpec spec = base;
        spec.benchmark = b;
        spec.scenario = s;
        spec.irqchip = c;
        out.push_back(std::move(spec));
      }
    }
  }
  return out;
}

std::vector<ResultSet> run_sweep_serial(std::span<const RunSpec> specs) {
  std::vector<ResultSet> out;
  out.reserve(specs.size());
  for (const RunSpec& s : specs) out.push_back(run(s));
  return out;
}

std::vector<ResultSet> run_sweep_parallel(std::span<const RunSpec> specs, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(specs.size());
  std::vector<ResultSet> out(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = run(specs[k]);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace partsim
