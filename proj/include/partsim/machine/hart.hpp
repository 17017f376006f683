// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "partsim/machine/privilege.hpp"
#include "partsim/sim/time.hpp"

namespace partsim {

using HartId = std::uint32_t;
using CellId = std::uint32_t;

inline constexpr unsigned kMaxHarts = 64;

/// Set of harts, as passed to SBI calls (hart_mask with base 0).
class HartMask {
 public:
  constexpr HartMask() = default;
  constexpr explicit HartMask(std::uint64_t bits) : bits_(bits) {}

  static constexpr HartMask single(HartId hart) { return HartMask(std::uint64_t{1} << hart); }
  static HartMask of(std::initializer_list<HartId> harts) {
    HartMask m;
    for (HartId h : harts) m.insert(h);
    return m;
  }
  static constexpr HartMask first(unsigned count) {
    return HartMask(count >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1);
  }

  constexpr bool contains(HartId hart) const { return hart < 64 && ((bits_ >> hart) & 1u); }
  constexpr void insert(HartId hart) { bits_ |= std::uint64_t{1} << hart; }
  constexpr void erase(HartId hart) { bits_ &= ~(std::uint64_t{1} << hart); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int count() const { return std::popcount(bits_); }
  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool subset_of(HartMask other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool intersects(HartMask other) const { return (bits_ & other.bits_) != 0; }

  constexpr HartMask operator|(HartMask o) const { return HartMask(bits_ | o.bits_); }
  constexpr HartMask operator&(HartMask o) const { return HartMask(bits_ & o.bits_); }
  constexpr HartMask minus(HartMask o) const { return HartMask(bits_ & ~o.bits_); }

  std::vector<HartId> to_vector() const {
    std::vector<HartId> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<HartId>(std::countr_zero(b)));
    return out;
  }

  constexpr bool operator==(const HartMask&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

/// Architectural state of one hardware thread.
struct Hart {
  HartId id = 0;
  PrivilegeMode mode = PrivilegeMode::S;
  IrqSet pending;
  IrqSet enable;
  Delegation delegation = Delegation::bare_metal();
  /// Global interrupt enable of the guest supervisor (sstatus.SIE / vsstatus.SIE).
  bool supervisor_ie = false;
  /// Cycles charged to this hart by executed operations.
  Cycles busy_cycles = 0;
  /// Owning cell, or nullopt for harts held by the hypervisor / bare metal.
  std::optional<CellId> owner;
};

}  // namespace partsim
