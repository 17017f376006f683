// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "partsim/devices/imsic.hpp"
#include "partsim/devices/plic.hpp"

namespace partsim {

enum class AplicMode : std::uint8_t { Direct, Msi };

/// Routing of one wired source. Direct mode uses `hart` and `priority`
/// (1 = highest); MSI mode uses `hart`, `level` (which IMSIC file) and
/// `identity`.
struct AplicTarget {
  HartId hart = 0;
  std::uint32_t priority = 1;
  IrqLevel level = IrqLevel::S;
  Identity identity = 0;
};

struct AplicCounters {
  ClaimCounters direct;
  std::uint64_t msi_forwards = 0;
  std::uint64_t unconfigured = 0;

  bool operator==(const AplicCounters&) const = default;
};

/// Decoded APLIC register.
struct AplicRegister {
  enum class Kind : std::uint8_t {
    Domaincfg, Sourcecfg, Setipnum, Setienum, Clrienum, Target,
    IdcDelivery, IdcForce, IdcThreshold, IdcTopi, IdcClaimi, Invalid
  };
  Kind kind = Kind::Invalid;
  SourceId source = 0;  // Sourcecfg, Target
  HartId hart = 0;      // Idc*
};

/// Advanced platform-level interrupt controller (supervisor domain). In
/// direct mode it delivers to a per-hart interrupt delivery control (IDC)
/// with claim/complete through `claimi`; in MSI mode it turns each wired
/// source into a write to an IMSIC file.
class Aplic : public Device {
 public:
  static constexpr Addr kDomaincfg = 0x0;
  static constexpr Addr kSourcecfg = 0x0;  // + 4*source, source >= 1
  static constexpr Addr kSetipnum = 0x1CDC;
  static constexpr Addr kSetienum = 0x1EDC;
  static constexpr Addr kClrienum = 0x1FDC;
  static constexpr Addr kTarget = 0x3000;  // + 4*(source-1)
  static constexpr Addr kIdc = 0x4000;     // + 32*hart
  static constexpr Addr kIdcStride = 32;
  static constexpr Addr kIdcDelivery = 0x00;
  static constexpr Addr kIdcForce = 0x04;
  static constexpr Addr kIdcThreshold = 0x08;
  static constexpr Addr kIdcTopi = 0x18;
  static constexpr Addr kIdcClaimi = 0x1C;

  Aplic(unsigned harts, unsigned sources, Imsic* imsic, IrqLine line);

  std::string_view name() const override { return "aplic"; }
  Addr size() const override;
  OpResult read(HartId initiator, Addr offset) override;
  OpResult write(HartId initiator, Addr offset, Word value) override;
  PageScope page_scope(Addr page_offset) const override;

  AplicRegister decode(Addr offset) const;
  Addr claimi_offset(HartId hart) const { return kIdc + kIdcStride * hart + kIdcClaimi; }

  AplicMode mode() const { return mode_; }
  void set_mode(AplicMode mode);

  /// Activates `source` with the given target and enables it.
  void configure(SourceId source, AplicTarget target);
  bool active(SourceId source) const { return active_.at(source); }
  const AplicTarget& target(SourceId source) const { return targets_.at(source); }
  bool enabled(SourceId source) const { return enabled_.at(source); }
  void set_enabled(SourceId source, bool enabled);

  /// A wired source asserts. Inactive sources are dropped with a diagnostic.
  void route(SourceId source);

  /// Direct mode: best source for the hart's IDC, 0 if none.
  SourceId best(HartId hart) const;
  SourceId claim(HartId hart);
  void complete(HartId hart, SourceId source);
  bool pending(SourceId source) const { return pending_.at(source); }
  const std::set<SourceId>& in_service(HartId hart) const { return in_service_.at(hart); }

  unsigned sources() const { return static_cast<unsigned>(active_.size()); }
  const AplicCounters& counters() const { return counters_; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  void check_source(SourceId source) const;
  void deliver(SourceId source);
  void update_lines();

  unsigned harts_;
  Imsic* imsic_;
  IrqLine line_;
  AplicMode mode_ = AplicMode::Direct;
  std::vector<bool> active_;
  std::vector<bool> enabled_;
  std::vector<bool> pending_;
  std::vector<bool> claimed_;
  std::vector<bool> latched_;
  std::vector<AplicTarget> targets_;
  std::vector<bool> idc_delivery_;
  std::vector<std::uint32_t> idc_threshold_;
  std::vector<std::set<SourceId>> in_service_;
  std::vector<bool> lines_;
  AplicCounters counters_;
  std::vector<std::string> diagnostics_;
};

}  // namespace partsim
