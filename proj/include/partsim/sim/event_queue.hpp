// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "partsim/sim/time.hpp"

namespace partsim {

/// Module an event is addressed to.
enum class Target : std::uint8_t {
  Hart,    // executor step / kick for one hart
  Clint,   // timer compare wakeup
  Source,  // an external device raising a wired interrupt source
  Load,    // neighbour-domain memory traffic
  Driver,  // benchmark driver callback
};

/// Opaque action descriptor. The receiving module interprets `code` and `arg`.
struct Action {
  Target target = Target::Hart;
  std::uint32_t code = 0;
  std::uint32_t hart = 0;
  std::uint64_t arg = 0;

  bool operator==(const Action&) const = default;
};

struct Event {
  SimTime due;
  std::uint64_t sequence = 0;
  Action action;
};

/// Raised for kernel contract violations (e.g. scheduling into the past).
/// These abort the run.
class SimulationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Pending events ordered by (due, sequence). The sequence number is an
/// insertion counter, so equal-time events dispatch in insertion order.
class EventQueue {
 public:
  /// Enqueues `action` at `due`. Throws SimulationError if due < now().
  void schedule(SimTime due, const Action& action);

  /// Pops the earliest event and advances now() to its due time. Returns
  /// nullopt when the queue is empty (end of simulation).
  std::optional<Event> advance();

  SimTime now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  std::uint64_t dispatched() const { return dispatched_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.due != b.due) return a.due > b.due;
      return a.sequence > b.sequence;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  SimTime now_{};
  std::uint64_t next_sequence_ = 0;
  std::uint64_t dispatched_ = 0;
};

}  // namespace partsim
