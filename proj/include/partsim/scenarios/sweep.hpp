// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "partsim/scenarios/run.hpp"

namespace partsim {

/// Cartesian product of benchmarks x scenarios x irqchips on top of `base`,
/// in that nesting order.
std::vector<RunSpec> sweep_grid(const RunSpec& base, std::span<const BenchmarkKind> benchmarks,
                                std::span<const Scenario> scenarios, std::span<const IrqChip> irqchips);

/// Reference implementation: runs the specs one after another.
std::vector<ResultSet> run_sweep_serial(std::span<const RunSpec> specs);

/// Runs independent specs on OpenMP worker threads (one simulation per
/// worker). Results are stored by index, so the output equals the serial
/// version regardless of scheduling. `threads` <= 0 uses the OpenMP default.
/// The first failure (by index) is rethrown after all workers finish.
std::vector<ResultSet> run_sweep_parallel(std::span<const RunSpec> specs, int threads = 0);

}  // namespace partsim
