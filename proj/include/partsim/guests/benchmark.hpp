// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "partsim/machine/machine.hpp"
#include "partsim/sim/time.hpp"

namespace partsim {

enum class BenchmarkKind : std::uint8_t { TimerJitter, IpiRtt, PlicPath, SyncTrap };

inline constexpr BenchmarkKind kAllBenchmarks[] = {BenchmarkKind::TimerJitter, BenchmarkKind::IpiRtt,
                                                  BenchmarkKind::PlicPath, BenchmarkKind::SyncTrap};

/// snake_case name used in reports (timer_jitter, ...).
std::string_view to_string(BenchmarkKind kind);
/// Dashed name used on the command line (timer-jitter, ...).
std::string_view cli_name(BenchmarkKind kind);
/// Accepts either spelling.
std::optional<BenchmarkKind> parse_benchmark(std::string_view text);
/// One-line description for list-benchmarks.
std::string_view describe(BenchmarkKind kind);

/// Per-phase cost of one external interrupt: delivery up to the guest
/// handler, the claim access and the complete access.
struct PhaseBreakdown {
  Cycles injection = 0;
  Cycles claim = 0;
  Cycles complete = 0;

  bool operator==(const PhaseBreakdown&) const = default;
};

struct BenchmarkSample {
  std::uint64_t iteration = 0;
  /// Jitter (timer), round trip (ipi), claim access cost (plic) or call cost (sync).
  Cycles cycles = 0;
  std::uint64_t hs_traps = 0;
  std::uint64_t m_entries = 0;
  std::optional<PhaseBreakdown> phases;

  bool operator==(const BenchmarkSample&) const = default;
};

/// Global trap-entry counters at one instant; per-iteration counts are
/// differences of two snapshots.
struct TrapSnapshot {
  std::uint64_t hs = 0;
  std::uint64_t m = 0;

  static TrapSnapshot take(const Machine& machine) {
    return {machine.entries(PrivilegeMode::HS), machine.entries(PrivilegeMode::M)};
  }
};

/// Collects samples until the target iteration count is reached.
class SampleLog {
 public:
  explicit SampleLog(std::uint64_t target) : target_(target) {}

  void record(Cycles cycles, const TrapSnapshot& start, const TrapSnapshot& end,
              std::optional<PhaseBreakdown> phases = std::nullopt);
  bool done() const { return samples_.size() >= target_; }
  std::uint64_t target() const { return target_; }
  std::uint64_t next_iteration() const { return samples_.size(); }
  const std::vector<BenchmarkSample>& samples() const { return samples_; }
  std::vector<BenchmarkSample> take() { return std::move(samples_); }

 private:
  std::uint64_t target_;
  std::vector<BenchmarkSample> samples_;
};

}  // namespace partsim
