// SPDX-License-Identifier: Apache-2.0
#include "partsim/scenarios/summary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace partsim {

namespace {

const std::array<double, Histogram::kBins + 1>& edges() {
  static const auto table = [] {
    std::array<double, Histogram::kBins + 1> e{};
    for (int i = 0; i <= Histogram::kBins; ++i)
      e[static_cast<std::size_t>(i)] = std::pow(10.0, static_cast<double>(i) / Histogram::kBinsPerDecade);
    return e;
  }();
  return table;
}

}  // namespace

double Histogram::edge(int i) { return edges().at(static_cast<std::size_t>(i)); }

int Histogram::bin_of(Cycles value) {
  const auto& e = edges();
  const double v = static_cast<double>(value);
  const auto it = std::upper_bound(e.begin(), e.end(), v);
  const int bin = static_cast<int>(it - e.begin()) - 1;
  return std::clamp(bin, 0, kBins - 1);
}

std::uint64_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

int Histogram::occupied() const {
  return static_cast<int>(std::count_if(counts.begin(), counts.end(), [](std::uint64_t c) { return c != 0; }));
}

std::size_t order_index(std::size_t n, std::size_t num, std::size_t den) {
  if (n == 0) throw std::invalid_argument("order statistic of an empty sample");
  const std::size_t k = (num * n + den - 1) / den;
  return k == 0 ? 0 : k - 1;
}

Summary summarize_cycles(std::span<const Cycles> cycles) {
  if (cycles.empty()) throw std::invalid_argument("cannot summarize an empty sample set");
  std::vector<Cycles> sorted(cycles.begin(), cycles.end());
  std::sort(sorted.begin(), sorted.end());
  Summary s;
  s.count = sorted.size();
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = sorted[order_index(sorted.size(), 1, 2)];
  s.p99 = sorted[order_index(sorted.size(), 99, 100)];
  long double sum = 0;
  for (Cycles c : sorted) {
    sum += static_cast<long double>(c);
    s.histogram.add(c);
  }
  s.mean = static_cast<double>(sum / static_cast<long double>(sorted.size()));
  return s;
}

Summary summarize(std::span<const BenchmarkSample> samples) {
  std::vector<Cycles> cycles;
  cycles.reserve(samples.size());
  for (const BenchmarkSample& b : samples) cycles.push_back(b.cycles);
  Summary s = summarize_cycles(cycles);
  s.hs_traps_per_iteration = samples.front().hs_traps;
  s.m_entries_per_iteration = samples.front().m_entries;
  for (const BenchmarkSample& b : samples) {
    if (b.hs_traps != samples.front().hs_traps || b.m_entries != samples.front().m_entries) s.trap_counts_constant = false;
    s.hs_traps_per_iteration = std::max(s.hs_traps_per_iteration, b.hs_traps);
    s.m_entries_per_iteration = std::max(s.m_entries_per_iteration, b.m_entries);
  }
  return s;
}

}  // namespace partsim
