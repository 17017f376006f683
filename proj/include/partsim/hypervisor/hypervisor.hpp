// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "partsim/devices/bus.hpp"
#include "partsim/devices/irqchip.hpp"
#include "partsim/hypervisor/cell.hpp"
#include "partsim/machine/platform.hpp"

namespace partsim {

/// Lifecycle request that violates phase discipline or resource ownership.
class CellError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class HvPhase : std::uint8_t { Partitioning, Operational };

/// HS entries by cause. Every operational-phase HS trap increments exactly
/// one category.
struct InterventionCounter {
  std::uint64_t sbi_moderation = 0;
  std::uint64_t timer_injection = 0;
  std::uint64_t ipi_injection = 0;
  std::uint64_t external_injection = 0;
  std::uint64_t plic_emulation = 0;
  std::uint64_t denied = 0;
  std::uint64_t other = 0;

  std::uint64_t total() const {
    return sbi_moderation + timer_injection + ipi_injection + external_injection + plic_emulation + denied + other;
  }
  InterventionCounter operator-(const InterventionCounter& o) const;
  bool operator==(const InterventionCounter&) const = default;
};

/// How one HS trap was resolved.
struct HvAction {
  enum class Kind : std::uint8_t { Inject, EmulateMmio, ForwardSbi, Deny, Unattributed };
  Kind kind = Kind::Unattributed;
  HartId hart = 0;
  Interrupt irq{};       // Inject
  MmioRequest access;    // EmulateMmio
  std::string reason;    // Deny / Unattributed
};

std::string_view to_string(HvAction::Kind kind);

struct HypervisorConfig {
  IrqChip irqchip = IrqChip::PlicClint;
  /// Inject forwarded IPIs straight into the target instead of going through
  /// firmware.
  bool hv_ipi_shortcut = false;
  /// Physical memory initially owned by the root cell.
  RangeSet memory{MemRange{0x80000000, 0x40000000}};
};

/// Static partitioning hypervisor. During the partitioning phase cells are
/// carved out of the root cell; once operational, every HS entry is a trap
/// to moderate, inject or emulate, and is counted.
class Hypervisor : public TrapHandler {
 public:
  static constexpr CellId kRootCell = 0;

  Hypervisor(Platform& platform, DeviceBus& bus, HypervisorConfig config);

  HvPhase phase() const { return phase_; }
  const HypervisorConfig& config() const { return config_; }

  /// Moves the requested resources from the root cell into a new cell.
  /// Atomic: on any conflict nothing changes and CellError is thrown.
  CellId create_cell(const CellConfig& config);
  void start_cell(CellId id);
  void stop_cell(CellId id);
  /// Returns the cell's resources to the root cell.
  void destroy_cell(CellId id);
  /// Ends the partitioning phase; later lifecycle requests are rejected.
  void enter_operational();

  const Cell& cell(CellId id) const;
  const Cell& root() const { return cell(kRootCell); }
  const Cell* cell_of_hart(HartId hart) const;
  const std::map<CellId, Cell>& cells() const { return cells_; }

  /// Routes a wired source of a cell to the supervisor context of `hart` on
  /// the configured interrupt controller (partitioning-time device setup).
  void route_source(SourceId source, HartId hart, Identity msi_identity = 0);

  void on_trap(HartContext& ctx, const TrapRecord& record) override;

  /// Sets the VS-level pending bit of `type` on `hart` and counts the
  /// injection in its category.
  void inject_irq(HartId hart, IrqType type);

  /// Why a guest access to a PLIC register must be denied, or nullopt.
  std::optional<std::string> check_plic_access(HartId hart, const MmioRequest& request) const;
  std::optional<std::string> check_aplic_access(HartId hart, const MmioRequest& request) const;

  const InterventionCounter& counters() const { return counters_; }
  const HvAction& last_action() const { return last_action_; }
  std::uint64_t actions(HvAction::Kind kind) const { return action_counts_[static_cast<std::size_t>(kind)]; }
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  Cell& mutable_cell(CellId id);
  void require_partitioning(std::string_view what) const;
  void apply_ownership();
  void resolve(HvAction action);

  void moderate_sbi(HartContext& ctx);
  void emulate_mmio(HartContext& ctx);
  void deny(HartContext& ctx, std::string reason);
  void unattributed(HartContext& ctx, std::string reason);

  Platform& platform_;
  DeviceBus& bus_;
  HypervisorConfig config_;
  HvPhase phase_ = HvPhase::Partitioning;
  std::map<CellId, Cell> cells_;
  CellId next_id_ = 1;
  InterventionCounter counters_;
  HvAction last_action_;
  std::array<std::uint64_t, 5> action_counts_{};
  std::vector<std::string> diagnostics_;
};

}  // namespace partsim
