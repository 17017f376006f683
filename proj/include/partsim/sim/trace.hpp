// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "partsim/sim/time.hpp"

namespace partsim {

enum class TraceKind : std::uint8_t { TrapEntry, TrapExit, IrqAssert, Mmio, SbiCall, Injection };

std::string_view to_string(TraceKind kind);

struct TraceRecord {
  SimTime time;
  std::uint32_t hart = 0;
  TraceKind kind = TraceKind::TrapEntry;
  std::string detail;

  bool operator==(const TraceRecord&) const = default;
};

/// Append-only record of architectural events. Disabled traces drop records.
class Trace {
 public:
  explicit Trace(bool enabled = false) : enabled_(enabled) {}

  bool enabled() const { return enabled_; }
  void set_enabled(bool enabled) { enabled_ = enabled; }

  /// Appends a record. Records must arrive in non-decreasing time order;
  /// violations throw SimulationError.
  void record(SimTime time, std::uint32_t hart, TraceKind kind, std::string detail);

  const std::vector<TraceRecord>& records() const { return records_; }

  /// CSV with header `time,hart,kind,detail`.
  void write_csv(std::ostream& out) const;

 private:
  bool enabled_;
  std::vector<TraceRecord> records_;
};

}  // namespace partsim
