// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace partsim {

/// Privilege modes. `S` is the supervisor of a bare-metal (non-virtualized)
/// run; `HS` is the hypervisor-extended supervisor and `VS` the guest.
enum class PrivilegeMode : std::uint8_t { U, VS, S, HS, M };

/// U < VS < HS < M, and U < S < M. S and HS never coexist in one run.
constexpr int rank(PrivilegeMode mode) {
  switch (mode) {
    case PrivilegeMode::U: return 0;
    case PrivilegeMode::VS: return 1;
    case PrivilegeMode::S: return 2;
    case PrivilegeMode::HS: return 2;
    case PrivilegeMode::M: return 3;
  }
  return 0;
}

constexpr bool more_privileged(PrivilegeMode a, PrivilegeMode b) { return rank(a) > rank(b); }

std::string_view to_string(PrivilegeMode mode);
std::optional<PrivilegeMode> parse_privilege(std::string_view text);

enum class IrqType : std::uint8_t { Software, Timer, External };

/// Level at which an interrupt is signalled. `S` is the HS level in a
/// virtualized run and the plain supervisor level on bare metal.
enum class IrqLevel : std::uint8_t { S, VS, M };

/// One (type, level) interrupt. Encoded with the RISC-V mip bit positions:
/// software 1/2/3, timer 5/6/7, external 9/10/11 for S/VS/M.
struct Interrupt {
  IrqType type = IrqType::Software;
  IrqLevel level = IrqLevel::S;

  constexpr unsigned bit() const {
    const unsigned base = type == IrqType::Software ? 1u : type == IrqType::Timer ? 5u : 9u;
    const unsigned offset = level == IrqLevel::S ? 0u : level == IrqLevel::VS ? 1u : 2u;
    return base + offset;
  }

  static constexpr std::optional<Interrupt> from_bit(unsigned bit) {
    if (bit < 1 || bit > 11 || bit == 4 || bit == 8) return std::nullopt;
    const unsigned group = (bit - 1) / 4;
    const unsigned offset = (bit - 1) % 4;
    const IrqType type = group == 0 ? IrqType::Software : group == 1 ? IrqType::Timer : IrqType::External;
    const IrqLevel level = offset == 0 ? IrqLevel::S : offset == 1 ? IrqLevel::VS : IrqLevel::M;
    return Interrupt{type, level};
  }

  constexpr bool operator==(const Interrupt&) const = default;
};

std::string to_string(Interrupt irq);
std::string_view to_string(IrqType type);
std::string_view to_string(IrqLevel level);

namespace irq {
inline constexpr Interrupt kSsi{IrqType::Software, IrqLevel::S};
inline constexpr Interrupt kVssi{IrqType::Software, IrqLevel::VS};
inline constexpr Interrupt kMsi{IrqType::Software, IrqLevel::M};
inline constexpr Interrupt kSti{IrqType::Timer, IrqLevel::S};
inline constexpr Interrupt kVsti{IrqType::Timer, IrqLevel::VS};
inline constexpr Interrupt kMti{IrqType::Timer, IrqLevel::M};
inline constexpr Interrupt kSei{IrqType::External, IrqLevel::S};
inline constexpr Interrupt kVsei{IrqType::External, IrqLevel::VS};
inline constexpr Interrupt kMei{IrqType::External, IrqLevel::M};

/// Architectural priority: MEI MSI MTI SEI SSI STI VSEI VSSI VSTI.
inline constexpr std::array<Interrupt, 9> kPriorityOrder{kMei, kMsi, kMti, kSei, kSsi,
                                                         kSti, kVsei, kVssi, kVsti};
}  // namespace irq

/// Bitset over the nine interrupt kinds, laid out like mip/mie.
class IrqSet {
 public:
  constexpr IrqSet() = default;
  constexpr explicit IrqSet(std::uint16_t bits) : bits_(bits) {}

  constexpr bool test(Interrupt irq) const { return (bits_ >> irq.bit()) & 1u; }
  constexpr void set(Interrupt irq, bool value = true) {
    const auto mask = static_cast<std::uint16_t>(1u << irq.bit());
    bits_ = value ? static_cast<std::uint16_t>(bits_ | mask) : static_cast<std::uint16_t>(bits_ & ~mask);
  }
  constexpr void reset(Interrupt irq) { set(irq, false); }
  constexpr bool any() const { return bits_ != 0; }
  constexpr std::uint16_t bits() const { return bits_; }
  constexpr int count() const { return std::popcount(bits_); }

  constexpr IrqSet operator&(IrqSet other) const { return IrqSet(bits_ & other.bits_); }
  constexpr bool operator==(const IrqSet&) const = default;

 private:
  std::uint16_t bits_ = 0;
};

/// Routing of each interrupt kind to the mode that handles it (the combined
/// effect of mideleg and hideleg). Fixed at boot.
class Delegation {
 public:
  /// Hypervisor present: M-level -> M, S-level -> HS, VS-level -> VS.
  static Delegation virtualized();
  /// No hypervisor: M-level -> M, S-level -> S (VS-level unused, routed to S).
  static Delegation bare_metal();

  PrivilegeMode route(Interrupt irq) const { return routes_[irq.bit()]; }

  /// Overrides the route of one kind. Throws std::invalid_argument for a route
  /// the machine cannot realize (M-level must stay in M, S-level goes to the
  /// supervisor, VS-level to VS or the supervisor).
  void set_route(Interrupt irq, PrivilegeMode mode);

  bool operator==(const Delegation&) const = default;

 private:
  explicit Delegation(bool virtualized);
  bool virtualized_;
  std::array<PrivilegeMode, 12> routes_{};
};

}  // namespace partsim
