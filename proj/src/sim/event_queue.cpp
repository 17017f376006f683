// SPDX-License-Identifier: Apache-2.0
#include "partsim/sim/event_queue.hpp"

#include <fmt/core.h>

namespace partsim {

void EventQueue::schedule(SimTime due, const Action& action) {
  if (due < now_) {
    throw SimulationError(
        fmt::format("past event: due={} now={} target={}", due.cycles, now_.cycles,
                    static_cast<int>(action.target)));
  }
  heap_.push(Event{due, next_sequence_++, action});
}

std::optional<Event> EventQueue::advance() {
  if (heap_.empty()) return std::nullopt;
  Event ev = heap_.top();
  heap_.pop();
  now_ = ev.due;
  ++dispatched_;
  return ev;
}

}  // namespace partsim
