// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "partsim/machine/hart.hpp"
#include "partsim/machine/mmio.hpp"

namespace partsim {

inline constexpr Addr kPageSize = 0x1000;

constexpr Addr page_of(Addr addr) { return addr & ~(kPageSize - 1); }

/// Who may access a page directly from VS mode.
struct PageOwner {
  enum class Kind : std::uint8_t { Cell, Shared, HypervisorOnly };
  Kind kind = Kind::HypervisorOnly;
  CellId cell = 0;

  static PageOwner of_cell(CellId id) { return {Kind::Cell, id}; }
  static PageOwner shared() { return {Kind::Shared, 0}; }
  static PageOwner hypervisor_only() { return {Kind::HypervisorOnly, 0}; }
  bool operator==(const PageOwner&) const = default;
};

std::string to_string(const PageOwner& owner);

/// Which contexts have registers on one device page. `machine` marks M-level
/// (firmware/hypervisor) registers; `harts` lists harts whose supervisor
/// context registers live there; `global` marks registers not tied to any
/// context (source priorities, pending bits, configuration).
struct PageScope {
  bool global = false;
  bool machine = false;
  HartMask harts;

  static PageScope global_page() { return {true, false, {}}; }
  static PageScope machine_page() { return {false, true, {}}; }
  static PageScope of_harts(HartMask harts) { return {false, false, harts}; }
};

/// Resolves a page scope to an owner given the owning cell of each hart:
/// one cell's harts only -> that cell, machine-only -> hypervisor-only,
/// anything touching more than one party -> shared.
PageOwner resolve_owner(const PageScope& scope, const std::function<std::optional<CellId>(HartId)>& hart_owner);

struct Region {
  Addr base = 0;
  Addr length = 0;
  std::uint32_t device = 0;
  std::string name;

  Addr end() const { return base + length; }
  bool contains(Addr addr) const { return addr >= base && addr < end(); }
};

/// Non-overlapping device regions plus a per-page owner table.
class MemoryMap {
 public:
  /// Throws std::invalid_argument if the region is empty, not page aligned or
  /// overlaps an existing one.
  void add_region(Region region);

  const Region* find(Addr addr) const;
  const std::vector<Region>& regions() const { return regions_; }

  void set_owner(Addr page, PageOwner owner) { owners_[page_of(page)] = owner; }
  void clear_owners() { owners_.clear(); }
  /// Owner of the page containing `addr`; unlisted pages are hypervisor-only.
  PageOwner owner(Addr addr) const;
  const std::map<Addr, PageOwner>& owners() const { return owners_; }

 private:
  std::vector<Region> regions_;
  std::map<Addr, PageOwner> owners_;
};

}  // namespace partsim
