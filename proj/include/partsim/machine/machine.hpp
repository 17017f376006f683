// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "partsim/machine/hart.hpp"
#include "partsim/machine/trap.hpp"
#include "partsim/sim/event_queue.hpp"

namespace partsim {

/// Who drives a pending bit. A bit is pending while any driver holds it.
/// Device drivers are level signals; `Software` is a latched write (firmware
/// forwarding, hypervisor injection, SSWI doorbell) cleared by an explicit
/// consume.
enum class IrqDriver : std::uint8_t { Software, Plic, Aplic, Imsic, Clint };

/// Raised by take_trap when no interrupt is eligible.
class SpuriousTrap : public SimulationError {
 public:
  using SimulationError::SimulationError;
};

/// Per-bit edge counters used for the conservation checks: every rising edge
/// of a pending bit must be matched by exactly one falling edge by run end,
/// and no software set may hit an already-set bit.
struct PendingConservation {
  std::array<std::uint64_t, 12> rises{};
  std::array<std::uint64_t, 12> falls{};
  std::array<std::uint64_t, 12> redundant_sets{};

  std::uint64_t total_rises() const;
  std::uint64_t total_falls() const;
  std::uint64_t total_redundant() const;
};

/// The harts of one platform: pending/enable state, routing and the trap
/// state machine. Does not advance time itself.
class Machine {
 public:
  Machine(unsigned hart_count, bool virtualized);

  unsigned size() const { return static_cast<unsigned>(harts_.size()); }
  bool virtualized() const { return virtualized_; }
  Hart& hart(HartId id);
  const Hart& hart(HartId id) const;
  /// Mode a supervisor-level guest runs in (VS if virtualized, else S).
  PrivilegeMode guest_mode() const { return virtualized_ ? PrivilegeMode::VS : PrivilegeMode::S; }

  /// Latched (software) set / consume of a pending bit.
  void set_pending(HartId hart, Interrupt irq);
  void clear_pending(HartId hart, Interrupt irq);
  /// Level driven by a device.
  void set_line(HartId hart, Interrupt irq, IrqDriver driver, bool level);

  bool pending(HartId hart, Interrupt irq) const { return this->hart(hart).pending.test(irq); }
  void set_enabled(HartId hart, Interrupt irq, bool enabled);

  /// Physical arrival of an interrupt: timer and software arrive at M level,
  /// external at S level. Returns the bit that was set.
  Interrupt assert_interrupt(HartId hart, IrqType type);

  /// Highest-priority interrupt that would trap now, if any.
  std::optional<Interrupt> next_eligible(HartId hart) const;

  /// Takes the highest-priority eligible interrupt: switches mode to its
  /// route and returns the record. Throws SpuriousTrap if none is eligible.
  TrapRecord take_trap(HartId hart, SimTime now);

  /// Synchronous exception into its target mode.
  TrapRecord raise_exception(HartId hart, Exception e, SimTime now);

  /// Returns to record.from_mode and restores the guest interrupt enable.
  void trap_return(HartId hart, TrapRecord& record, SimTime now);

  std::uint64_t entries(PrivilegeMode to_mode) const { return entries_[static_cast<int>(to_mode)]; }
  const PendingConservation& conservation() const { return conservation_; }

  /// Called whenever pending or enable bits of a hart change.
  void set_change_listener(std::function<void(HartId)> listener) { listener_ = std::move(listener); }

 private:
  TrapRecord enter(HartId hart, TrapCause cause, PrivilegeMode to, SimTime now);
  void refresh(HartId hart, Interrupt irq);
  void notify(HartId hart);

  bool virtualized_;
  std::vector<Hart> harts_;
  std::vector<std::array<std::uint8_t, 12>> drivers_;
  std::array<std::uint64_t, 5> entries_{};
  PendingConservation conservation_;
  std::function<void(HartId)> listener_;
};

}  // namespace partsim
