// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "partsim/devices/bus.hpp"
#include "partsim/firmware/sbi_types.hpp"
#include "partsim/machine/platform.hpp"

namespace partsim {

struct FirmwareCounters {
  std::array<std::uint64_t, 5> calls{};  // indexed by SbiFunction
  std::uint64_t timer_irqs = 0;
  std::uint64_t software_irqs = 0;

  std::uint64_t total_calls() const;
};

/// M-mode SBI implementation. Timer and software interrupts arrive here
/// first and are forwarded to the supervisor level by setting STIP / SSIP.
/// Firmware only touches CLINT state and the M-level view of the pending
/// bits; it never denies a call.
class Firmware : public TrapHandler {
 public:
  Firmware(Platform& platform, DeviceBus& bus);

  /// Enables the M-level timer and software interrupts on every hart.
  void boot();

  void on_trap(HartContext& ctx, const TrapRecord& record) override;

  /// Immediate forms of the SBI functions (state effect plus nominal cost,
  /// without contention). The trap path performs the same effects as timed
  /// operations.
  SbiOutcome sbi_set_timer(HartId caller, SimTime deadline);
  SbiOutcome sbi_send_ipi(HartId caller, HartMask mask);
  SbiOutcome sbi_rfence(HartId caller, HartMask mask);
  SbiOutcome sbi_hart_start(HartId caller, HartId target);
  SbiOutcome sbi_hart_stop(HartId caller, HartId target);

  bool hart_started(HartId hart) const { return started_.at(hart); }
  const FirmwareCounters& counters() const { return counters_; }

 private:
  bool valid_mask(HartMask mask) const;
  void handle_ecall(HartContext& ctx);

  Platform& platform_;
  DeviceBus& bus_;
  std::vector<bool> started_;
  FirmwareCounters counters_;
};

}  // namespace partsim
