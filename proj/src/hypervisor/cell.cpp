// SPDX-License-Identifier: Apache-2.0
#include "partsim/hypervisor/cell.hpp"

#include <algorithm>

namespace partsim {

std::string_view to_string(CellState state) {
  switch (state) {
    case CellState::Created: return "created";
    case CellState::Running: return "running";
    case CellState::Stopped: return "stopped";
  }
  return "?";
}

RangeSet::RangeSet(std::initializer_list<MemRange> ranges) {
  for (const MemRange& r : ranges) add(r);
}

void RangeSet::add(MemRange range) {
  if (range.length == 0) return;
  std::vector<MemRange> out;
  out.reserve(ranges_.size() + 1);
  Addr lo = range.base;
  Addr hi = range.end();
  bool placed = false;
  for (const MemRange& r : ranges_) {
    if (r.end() < lo) {
      out.push_back(r);
    } else if (hi < r.base) {
      if (!placed) {
        out.push_back({lo, hi - lo});
        placed = true;
      }
      out.push_back(r);
    } else {
      lo = std::min(lo, r.base);
      hi = std::max(hi, r.end());
    }
  }
  if (!placed) out.push_back({lo, hi - lo});
  std::sort(out.begin(), out.end(), [](const MemRange& a, const MemRange& b) { return a.base < b.base; });
  ranges_ = std::move(out);
}

void RangeSet::subtract(MemRange range) {
  if (range.length == 0) return;
  std::vector<MemRange> out;
  for (const MemRange& r : ranges_) {
    if (r.end() <= range.base || range.end() <= r.base) {
      out.push_back(r);
      continue;
    }
    if (r.base < range.base) out.push_back({r.base, range.base - r.base});
    if (range.end() < r.end()) out.push_back({range.end(), r.end() - range.end()});
  }
  ranges_ = std::move(out);
}

bool RangeSet::covers(MemRange range) const {
  if (range.length == 0) return true;
  for (const MemRange& r : ranges_) {
    if (r.base <= range.base && range.end() <= r.end()) return true;
  }
  return false;
}

bool RangeSet::intersects(MemRange range) const {
  for (const MemRange& r : ranges_) {
    if (range.base < r.end() && r.base < range.end()) return true;
  }
  return false;
}

Addr RangeSet::total() const {
  Addr sum = 0;
  for (const MemRange& r : ranges_) sum += r.length;
  return sum;
}

}  // namespace partsim
