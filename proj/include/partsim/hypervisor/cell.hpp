// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "partsim/devices/plic.hpp"
#include "partsim/machine/hart.hpp"
#include "partsim/machine/mmio.hpp"

namespace partsim {

/// Half-open physical memory range [base, base + length).
struct MemRange {
  Addr base = 0;
  Addr length = 0;

  Addr end() const { return base + length; }
  bool operator==(const MemRange&) const = default;
};

/// Set of physical addresses kept as sorted, disjoint, non-adjacent ranges.
class RangeSet {
 public:
  RangeSet() = default;
  RangeSet(std::initializer_list<MemRange> ranges);

  void add(MemRange range);
  void subtract(MemRange range);
  bool covers(MemRange range) const;
  bool intersects(MemRange range) const;
  bool contains(Addr addr) const { return covers({addr, 1}); }
  const std::vector<MemRange>& ranges() const { return ranges_; }
  bool empty() const { return ranges_.empty(); }
  Addr total() const;

  bool operator==(const RangeSet&) const = default;

 private:
  std::vector<MemRange> ranges_;
};

enum class CellState : std::uint8_t { Created, Running, Stopped };

std::string_view to_string(CellState state);

/// Resources requested for a new cell.
struct CellConfig {
  std::string name;
  HartMask harts;
  std::vector<MemRange> memory;
  std::set<SourceId> irq_sources;
  /// Shared communication page (mailbox); not carved from the root cell.
  std::optional<MemRange> comm_page;
  bool hugepage_gstage = false;
};

struct Cell {
  CellId id = 0;
  std::string name;
  HartMask harts;
  RangeSet memory;
  std::set<SourceId> irq_sources;
  std::optional<MemRange> comm_page;
  bool hugepage_gstage = false;
  CellState state = CellState::Created;

  bool owns_source(SourceId source) const { return irq_sources.count(source) != 0; }
};

}  // namespace partsim
