// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "partsim/scenarios/run.hpp"

namespace partsim {

struct MetricRatio {
  std::string metric;
  double base = 0.0;
  double other = 0.0;
  /// other / base; 1.0 when both are zero, nullopt when only base is zero.
  std::optional<double> ratio;
};

enum class Verdict : std::uint8_t { Equivalent, BaseDominates, OtherDominates, Mixed };
std::string_view to_string(Verdict v);

/// `base` dominates when it is no worse (lower or equal) on every metric
/// and strictly better on at least one.
struct Comparison {
  BenchmarkKind benchmark = BenchmarkKind::TimerJitter;
  std::string base_label;
  std::string other_label;
  std::vector<MetricRatio> metrics;
  std::int64_t hs_trap_delta = 0;   // other - base, per iteration
  std::int64_t m_entry_delta = 0;   // other - base, per iteration
  Verdict verdict = Verdict::Equivalent;
};

/// Throws std::invalid_argument when the benchmark kinds differ.
Comparison compare(const ResultSet& base, const ResultSet& other);

/// Plain-text table for the terminal.
std::string format_comparison(const Comparison& c);

}  // namespace partsim
