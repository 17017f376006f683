// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "partsim/devices/aplic.hpp"
#include "partsim/devices/imsic.hpp"
#include "partsim/devices/plic.hpp"
#include "partsim/scenarios/config.hpp"
#include "partsim/scenarios/summary.hpp"
#include "partsim/sim/trace.hpp"

namespace partsim {

/// A device or hypervisor protocol was broken during the run (e.g. a
/// complete without claim, an unattributed HS trap).
class ProtocolViolation : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

/// End-of-run counters used by the conservation and isolation checks.
struct RunStats {
  bool hypervisor_present = false;
  std::uint64_t hs_entries = 0;
  std::uint64_t m_entries = 0;
  InterventionCounter interventions;
  ClaimCounters plic;
  ClaimCounters aplic_direct;
  std::uint64_t aplic_msi_forwards = 0;
  ImsicCounters imsic;
  std::uint64_t pending_rises = 0;
  std::uint64_t pending_falls = 0;
  std::uint64_t pending_redundant = 0;
  std::uint64_t mailbox_posted = 0;
  std::uint64_t mailbox_taken = 0;
  std::uint64_t ipi_mismatches = 0;
  std::uint64_t load_bursts = 0;
  std::uint64_t events = 0;
  Cycles end_time = 0;
  std::vector<std::string> diagnostics;

  bool operator==(const RunStats&) const = default;
};

struct ResultSet {
  RunSpec spec;
  std::string version = PARTSIM_VERSION;
  std::vector<BenchmarkSample> samples;
  Summary summary;
  RunStats stats;
  std::vector<TraceRecord> trace;
};

/// Builds the system for `spec`, runs the benchmark and summarizes it.
/// ConfigError / CellError before simulation; ProtocolViolation if a
/// protocol counter is nonzero at the end.
ResultSet run(const RunSpec& spec);

}  // namespace partsim
