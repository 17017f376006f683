// SPDX-License-Identifier: Apache-2.0
#include "partsim/guests/benchmark.hpp"

namespace partsim {

std::string_view to_string(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::TimerJitter: return "timer_jitter";
    case BenchmarkKind::IpiRtt: return "ipi_rtt";
    case BenchmarkKind::PlicPath: return "plic_path";
    case BenchmarkKind::SyncTrap: return "sync_trap";
  }
  return "?";
}

std::string_view cli_name(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::TimerJitter: return "timer-jitter";
    case BenchmarkKind::IpiRtt: return "ipi-rtt";
    case BenchmarkKind::PlicPath: return "plic-path";
    case BenchmarkKind::SyncTrap: return "sync-trap";
  }
  return "?";
}

std::optional<BenchmarkKind> parse_benchmark(std::string_view text) {
  for (BenchmarkKind k : kAllBenchmarks) {
    if (text == to_string(k) || text == cli_name(k)) return k;
  }
  return std::nullopt;
}

std::string_view describe(BenchmarkKind kind) {
  switch (kind) {
    case BenchmarkKind::TimerJitter: return "periodic timer, arrival minus programmed deadline";
    case BenchmarkKind::IpiRtt: return "IPI echo between two harts of one cell, round-trip time";
    case BenchmarkKind::PlicPath: return "wired external interrupt, injection/claim/complete cost";
    case BenchmarkKind::SyncTrap: return "remote fence SBI call, cost of the synchronous trap";
  }
  return "?";
}

void SampleLog::record(Cycles cycles, const TrapSnapshot& start, const TrapSnapshot& end,
                       std::optional<PhaseBreakdown> phases) {
  BenchmarkSample s;
  s.iteration = samples_.size();
  s.cycles = cycles;
  s.hs_traps = end.hs - start.hs;
  s.m_entries = end.m - start.m;
  s.phases = phases;
  samples_.push_back(s);
}

}  // namespace partsim
