// SPDX-License-Identifier: Apache-2.0
#include "partsim/scenarios/compare.hpp"

#include <stdexcept>

#include <fmt/core.h>

namespace partsim {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Equivalent: return "equivalent";
    case Verdict::BaseDominates: return "base dominates";
    case Verdict::OtherDominates: return "other dominates";
    case Verdict::Mixed: return "mixed";
  }
  return "?";
}

namespace {

MetricRatio metric(std::string name, double base, double other) {
  MetricRatio m{std::move(name), base, other, std::nullopt};
  if (base == 0.0)
    m.ratio = other == 0.0 ? std::optional<double>(1.0) : std::nullopt;
  else
    m.ratio = other / base;
  return m;
}

}  // namespace

Comparison compare(const ResultSet& base, const ResultSet& other) {
  if (base.spec.benchmark != other.spec.benchmark)
    throw std::invalid_argument(fmt::format("cannot compare {} with {}", to_string(base.spec.benchmark),
                                            to_string(other.spec.benchmark)));
  const Summary& a = base.summary;
  const Summary& b = other.summary;
  Comparison c;
  c.benchmark = base.spec.benchmark;
  c.base_label = base.spec.label();
  c.other_label = other.spec.label();
  const auto d = [](auto v) { return static_cast<double>(v); };
  c.metrics = {
      metric("min", d(a.min), d(b.min)),
      metric("median", d(a.median), d(b.median)),
      metric("p99", d(a.p99), d(b.p99)),
      metric("max", d(a.max), d(b.max)),
      metric("mean", a.mean, b.mean),
      metric("hs_traps/iter", d(a.hs_traps_per_iteration), d(b.hs_traps_per_iteration)),
      metric("m_entries/iter", d(a.m_entries_per_iteration), d(b.m_entries_per_iteration)),
  };
  c.hs_trap_delta = static_cast<std::int64_t>(b.hs_traps_per_iteration) - static_cast<std::int64_t>(a.hs_traps_per_iteration);
  c.m_entry_delta =
      static_cast<std::int64_t>(b.m_entries_per_iteration) - static_cast<std::int64_t>(a.m_entries_per_iteration);

  bool base_better = false;
  bool other_better = false;
  for (const MetricRatio& m : c.metrics) {
    if (m.base < m.other) base_better = true;
    if (m.other < m.base) other_better = true;
  }
  c.verdict = base_better && other_better ? Verdict::Mixed
              : base_better               ? Verdict::BaseDominates
              : other_better              ? Verdict::OtherDominates
                                          : Verdict::Equivalent;
  return c;
}

std::string format_comparison(const Comparison& c) {
  std::string out = fmt::format("benchmark {}\nbase  {}\nother {}\n\n", to_string(c.benchmark), c.base_label, c.other_label);
  out += fmt::format("{:<16} {:>14} {:>14} {:>10}\n", "metric", "base", "other", "ratio");
  for (const MetricRatio& m : c.metrics) {
    const std::string ratio = m.ratio ? fmt::format("{:.3f}", *m.ratio) : "inf";
    out += fmt::format("{:<16} {:>14.1f} {:>14.1f} {:>10}\n", m.metric, m.base, m.other, ratio);
  }
  out += fmt::format("\nhs trap delta  {:+d}\nm entry delta  {:+d}\nverdict        {}\n", c.hs_trap_delta,
                     c.m_entry_delta, to_string(c.verdict));
  return out;
}

}  // namespace partsim
