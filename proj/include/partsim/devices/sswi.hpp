// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>

#include "partsim/devices/device.hpp"

namespace partsim {

/// Supervisor software-interrupt doorbell: writing 1 to setssip[h] raises
/// the S-level software interrupt of hart h. Reads return 0. The page is
/// reserved to the hypervisor; guests in VS cannot reach it.
class Sswi : public Device {
 public:
  static constexpr Addr kSetssip = 0x0;  // + 4*hart

  Sswi(unsigned harts, std::function<void(HartId)> raise) : harts_(harts), raise_(std::move(raise)) {}

  std::string_view name() const override { return "sswi"; }
  Addr size() const override { return kPageSize; }
  OpResult read(HartId, Addr offset) override {
    return offset < 4 * Addr{harts_} && offset % 4 == 0 ? OpResult{0} : OpResult::invalid();
  }
  OpResult write(HartId, Addr offset, Word value) override {
    if (offset >= 4 * Addr{harts_} || offset % 4 != 0) return OpResult::invalid();
    if (value & 1u) {
      ++doorbells_;
      if (raise_) raise_(static_cast<HartId>(offset / 4));
    }
    return {};
  }
  PageScope page_scope(Addr) const override { return PageScope::machine_page(); }

  std::uint64_t doorbells() const { return doorbells_; }

 private:
  unsigned harts_;
  std::function<void(HartId)> raise_;
  std::uint64_t doorbells_ = 0;
};

}  // namespace partsim
