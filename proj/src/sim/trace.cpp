// SPDX-License-Identifier: Apache-2.0
#include "partsim/sim/trace.hpp"

#include <ostream>

#include <fmt/core.h>

#include "partsim/sim/event_queue.hpp"

namespace partsim {

std::string_view to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::TrapEntry: return "trap-entry";
    case TraceKind::TrapExit: return "trap-exit";
    case TraceKind::IrqAssert: return "irq-assert";
    case TraceKind::Mmio: return "mmio";
    case TraceKind::SbiCall: return "sbi-call";
    case TraceKind::Injection: return "injection";
  }
  return "?";
}

void Trace::record(SimTime time, std::uint32_t hart, TraceKind kind, std::string detail) {
  if (!enabled_) return;
  if (!records_.empty() && time < records_.back().time) {
    throw SimulationError(fmt::format("trace record at {} precedes {}", time.cycles,
                                      records_.back().time.cycles));
  }
  records_.push_back(TraceRecord{time, hart, kind, std::move(detail)});
}

void Trace::write_csv(std::ostream& out) const {
  out << "time,hart,kind,detail\n";
  for (const auto& r : records_) {
    std::string detail = r.detail;
    for (auto& c : detail)
      if (c == ',' || c == '\n') c = ';';
    out << r.time.cycles << ',' << r.hart << ',' << to_string(r.kind) << ',' << detail << '\n';
  }
}

}  // namespace partsim
