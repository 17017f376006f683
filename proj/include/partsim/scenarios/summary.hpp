// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "partsim/guests/benchmark.hpp"
#include "partsim/hypervisor/hypervisor.hpp"

namespace partsim {

/// Log-spaced cycle histogram over [1, 1e6] with 12 bins per decade. Bin i
/// covers [10^(i/12), 10^((i+1)/12)); values outside the range are clamped
/// into the first or last bin.
struct Histogram {
  static constexpr int kBinsPerDecade = 12;
  static constexpr int kDecades = 6;
  static constexpr int kBins = kBinsPerDecade * kDecades;

  std::array<std::uint64_t, kBins> counts{};

  /// Lower edge of bin i (i in [0, kBins]; edge(kBins) = 1e6).
  static double edge(int i);
  static int bin_of(Cycles value);

  void add(Cycles value) { ++counts[static_cast<std::size_t>(bin_of(value))]; }
  std::uint64_t total() const;
  int occupied() const;
  bool operator==(const Histogram&) const = default;
};

struct Summary {
  std::uint64_t count = 0;
  Cycles min = 0;
  Cycles median = 0;
  Cycles p99 = 0;
  Cycles max = 0;
  double mean = 0.0;
  Histogram histogram;

  /// HS traps and M entries per iteration (max over iterations) and whether
  /// they were identical in every iteration.
  std::uint64_t hs_traps_per_iteration = 0;
  std::uint64_t m_entries_per_iteration = 0;
  bool trap_counts_constant = true;

  /// Whole-run counters (filled by run()).
  InterventionCounter interventions;
  std::uint64_t hs_entries = 0;
  std::uint64_t m_entries = 0;

  bool operator==(const Summary&) const = default;
};

/// Index of the q-quantile without interpolation: ceil(q*n) - 1, computed
/// in integers for q = num/den.
std::size_t order_index(std::size_t n, std::size_t num, std::size_t den);

/// Order statistics, mean, histogram and per-iteration trap counts. Throws
/// std::invalid_argument on an empty sample set.
Summary summarize(std::span<const BenchmarkSample> samples);
Summary summarize_cycles(std::span<const Cycles> cycles);

}  // namespace partsim
