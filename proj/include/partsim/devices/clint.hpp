// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "partsim/devices/device.hpp"
#include "partsim/sim/time.hpp"

namespace partsim {

/// Core-local interruptor: per-hart msip and mtimecmp plus the shared mtime.
/// The timer line of hart h is high iff mtime >= mtimecmp[h].
class Clint : public Device {
 public:
  static constexpr Addr kMsip = 0x0;
  static constexpr Addr kMtimecmp = 0x4000;
  static constexpr Addr kMtime = 0xBFF8;
  static constexpr Addr kSize = 0x10000;

  /// `wakeup` is asked to call sync() no later than the given time.
  Clint(unsigned harts, IrqLine line, std::function<void(SimTime)> wakeup);

  std::string_view name() const override { return "clint"; }
  Addr size() const override { return kSize; }
  OpResult read(HartId initiator, Addr offset) override;
  OpResult write(HartId initiator, Addr offset, Word value) override;
  PageScope page_scope(Addr) const override { return PageScope::machine_page(); }

  /// Advances mtime and updates the timer lines.
  void sync(SimTime now);

  SimTime mtime() const { return mtime_; }
  SimTime mtimecmp(HartId hart) const { return mtimecmp_.at(hart); }
  bool msip(HartId hart) const { return msip_.at(hart); }
  bool timer_line(HartId hart) const { return timer_line_.at(hart); }

  void set_mtimecmp(HartId hart, SimTime deadline);
  void set_msip(HartId hart, bool value);

 private:
  void update_timer(HartId hart);

  IrqLine line_;
  std::function<void(SimTime)> wakeup_;
  SimTime mtime_;
  std::vector<SimTime> mtimecmp_;
  std::vector<bool> msip_;
  std::vector<bool> timer_line_;
};

}  // namespace partsim
