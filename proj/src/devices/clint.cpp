// SPDX-License-Identifier: Apache-2.0
#include "partsim/devices/clint.hpp"

#include <stdexcept>

namespace partsim {

Clint::Clint(unsigned harts, IrqLine line, std::function<void(SimTime)> wakeup)
    : line_(std::move(line)),
      wakeup_(std::move(wakeup)),
      mtimecmp_(harts, SimTime::max()),
      msip_(harts, false),
      timer_line_(harts, false) {}

void Clint::update_timer(HartId hart) {
  const bool level = mtime_ >= mtimecmp_[hart];
  if (level == timer_line_[hart]) return;
  timer_line_[hart] = level;
  if (line_) line_(hart, irq::kMti, level);
}

void Clint::sync(SimTime now) {
  if (now < mtime_) throw std::logic_error("mtime moved backwards");
  mtime_ = now;
  for (HartId h = 0; h < mtimecmp_.size(); ++h) update_timer(h);
}

void Clint::set_mtimecmp(HartId hart, SimTime deadline) {
  mtimecmp_.at(hart) = deadline;
  update_timer(hart);
  if (deadline > mtime_ && deadline != SimTime::max() && wakeup_) wakeup_(deadline);
}

void Clint::set_msip(HartId hart, bool value) {
  if (msip_.at(hart) == value) return;
  msip_[hart] = value;
  if (line_) line_(hart, irq::kMsi, value);
}

OpResult Clint::read(HartId, Addr offset) {
  const auto harts = static_cast<Addr>(msip_.size());
  if (offset >= kMsip && offset < kMsip + 4 * harts && offset % 4 == 0) return {msip_[offset / 4] ? 1u : 0u};
  if (offset >= kMtimecmp && offset < kMtimecmp + 8 * harts && offset % 8 == 0)
    return {mtimecmp_[(offset - kMtimecmp) / 8].cycles};
  if (offset == kMtime) return {mtime_.cycles};
  return OpResult::invalid();
}

OpResult Clint::write(HartId, Addr offset, Word value) {
  const auto harts = static_cast<Addr>(msip_.size());
  if (offset >= kMsip && offset < kMsip + 4 * harts && offset % 4 == 0) {
    set_msip(static_cast<HartId>(offset / 4), (value & 1u) != 0);
    return {};
  }
  if (offset >= kMtimecmp && offset < kMtimecmp + 8 * harts && offset % 8 == 0) {
    set_mtimecmp(static_cast<HartId>((offset - kMtimecmp) / 8), SimTime{value});
    return {};
  }
  return OpResult::invalid();
}

}  // namespace partsim
