// SPDX-License-Identifier: Apache-2.0
#include "partsim/devices/imsic.hpp"

#include <bit>
#include <stdexcept>

#include <fmt/core.h>

namespace partsim {

namespace {

std::size_t level_index(IrqLevel level) {
  switch (level) {
    case IrqLevel::M: return 0;
    case IrqLevel::S: return 1;
    case IrqLevel::VS: return 2;
  }
  return 0;
}

}  // namespace

Identity ImsicFile::top() const {
  if (!delivery) return 0;
  std::uint64_t active = eip & eie & ~std::uint64_t{1};
  if (threshold != 0) active &= threshold >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << threshold) - 1;
  return active == 0 ? 0 : static_cast<Identity>(std::countr_zero(active));
}

Imsic::Imsic(unsigned harts, unsigned identities, Addr s_offset, IrqLine line)
    : harts_(harts), identities_(identities), s_offset_(s_offset), line_(std::move(line)), files_(harts), lines_(harts) {
  if (identities < 2 || identities > 64)
    throw std::invalid_argument(fmt::format("IMSIC identity count {} outside [2,64]", identities));
  if (s_offset % kPageSize != 0 || s_offset < harts * kPageSize)
    throw std::invalid_argument("IMSIC S-file area overlaps the M-file area");
  for (auto& l : lines_) l.fill(false);
}

Addr Imsic::size() const { return s_offset_ + harts_ * 2 * kPageSize; }

Addr Imsic::file_offset(HartId hart, IrqLevel level) const {
  if (hart >= harts_) throw std::out_of_range(fmt::format("IMSIC has no hart {}", hart));
  switch (level) {
    case IrqLevel::M: return hart * kPageSize;
    case IrqLevel::S: return s_offset_ + hart * 2 * kPageSize;
    case IrqLevel::VS: return s_offset_ + hart * 2 * kPageSize + kPageSize;
  }
  return 0;
}

const ImsicFile& Imsic::file(HartId hart, IrqLevel level) const { return files_.at(hart)[level_index(level)]; }
ImsicFile& Imsic::file(HartId hart, IrqLevel level) { return files_.at(hart)[level_index(level)]; }

void Imsic::update_line(HartId hart, IrqLevel level) {
  const bool level_now = file(hart, level).top() != 0;
  bool& current = lines_[hart][level_index(level)];
  if (current == level_now) return;
  current = level_now;
  if (line_) line_(hart, Interrupt{IrqType::External, level}, level_now);
}

void Imsic::msi_write(HartId hart, IrqLevel level, Identity id) {
  ImsicFile& f = file(hart, level);
  if (id == 0 || id >= identities_) {
    ++counters_.ignored_writes;
    return;
  }
  ++counters_.msi_writes;
  const std::uint64_t bit = std::uint64_t{1} << id;
  if (f.eip & bit) {
    ++counters_.absorbed_writes;
    return;
  }
  f.eip |= bit;
  ++counters_.eip_sets;
  update_line(hart, level);
}

Identity Imsic::claim_top(HartId hart, IrqLevel level) {
  ImsicFile& f = file(hart, level);
  const Identity id = f.top();
  if (id == 0) return 0;
  f.eip &= ~(std::uint64_t{1} << id);
  ++counters_.claims;
  update_line(hart, level);
  return id;
}

void Imsic::set_enabled(HartId hart, IrqLevel level, Identity id, bool enabled) {
  if (id == 0 || id >= identities_) return;
  ImsicFile& f = file(hart, level);
  const std::uint64_t bit = std::uint64_t{1} << id;
  f.eie = enabled ? (f.eie | bit) : (f.eie & ~bit);
  update_line(hart, level);
}

OpResult Imsic::read(HartId, Addr) {
  // seteipnum reads as zero; the remaining file state is reached via CSRs.
  return {0};
}

OpResult Imsic::write(HartId, Addr offset, Word value) {
  const Addr page = page_of(offset);
  if (offset - page != kSetEipNum) return OpResult::invalid();
  for (HartId h = 0; h < harts_; ++h) {
    for (IrqLevel level : {IrqLevel::M, IrqLevel::S, IrqLevel::VS}) {
      if (file_offset(h, level) == page) {
        msi_write(h, level, static_cast<Identity>(value));
        return {};
      }
    }
  }
  return OpResult::invalid();
}

PageScope Imsic::page_scope(Addr page_offset) const {
  const Addr page = page_of(page_offset);
  for (HartId h = 0; h < harts_; ++h) {
    if (file_offset(h, IrqLevel::VS) == page) return PageScope::of_harts(HartMask::single(h));
  }
  return PageScope::machine_page();
}

}  // namespace partsim
