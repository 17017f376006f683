// SPDX-License-Identifier: Apache-2.0
#include "partsim/devices/memory_map.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/core.h>

namespace partsim {

std::string to_string(const PageOwner& owner) {
  switch (owner.kind) {
    case PageOwner::Kind::Cell: return fmt::format("cell:{}", owner.cell);
    case PageOwner::Kind::Shared: return "shared";
    case PageOwner::Kind::HypervisorOnly: return "hypervisor-only";
  }
  return "?";
}

PageOwner resolve_owner(const PageScope& scope, const std::function<std::optional<CellId>(HartId)>& hart_owner) {
  if (scope.global) return PageOwner::shared();
  if (scope.harts.empty()) return PageOwner::hypervisor_only();
  if (scope.machine) return PageOwner::shared();
  std::optional<CellId> cell;
  for (HartId h : scope.harts.to_vector()) {
    const auto owner = hart_owner(h);
    if (!owner) return PageOwner::shared();
    if (cell && *cell != *owner) return PageOwner::shared();
    cell = owner;
  }
  return PageOwner::of_cell(*cell);
}

void MemoryMap::add_region(Region region) {
  if (region.length == 0) throw std::invalid_argument(fmt::format("region {} is empty", region.name));
  if (region.base % kPageSize != 0 || region.length % kPageSize != 0)
    throw std::invalid_argument(fmt::format("region {} is not page aligned", region.name));
  for (const Region& r : regions_) {
    if (region.base < r.end() && r.base < region.end())
      throw std::invalid_argument(fmt::format("region {} [{:#x},{:#x}) overlaps {} [{:#x},{:#x})", region.name,
                                              region.base, region.end(), r.name, r.base, r.end()));
  }
  regions_.push_back(std::move(region));
  std::sort(regions_.begin(), regions_.end(), [](const Region& a, const Region& b) { return a.base < b.base; });
}

const Region* MemoryMap::find(Addr addr) const {
  auto it = std::upper_bound(regions_.begin(), regions_.end(), addr,
                             [](Addr a, const Region& r) { return a < r.base; });
  if (it == regions_.begin()) return nullptr;
  --it;
  return it->contains(addr) ? &*it : nullptr;
}

PageOwner MemoryMap::owner(Addr addr) const {
  auto it = owners_.find(page_of(addr));
  return it == owners_.end() ? PageOwner::hypervisor_only() : it->second;
}

}  // namespace partsim
