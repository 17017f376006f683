// SPDX-License-Identifier: Apache-2.0
#include "partsim/devices/aplic.hpp"

#include <stdexcept>

#include <fmt/core.h>

namespace partsim {

Aplic::Aplic(unsigned harts, unsigned sources, Imsic* imsic, IrqLine line)
    : harts_(harts),
      imsic_(imsic),
      line_(std::move(line)),
      active_(sources, false),
      enabled_(sources, false),
      pending_(sources, false),
      claimed_(sources, false),
      latched_(sources, false),
      targets_(sources),
      idc_delivery_(harts, true),
      idc_threshold_(harts, 0),
      in_service_(harts),
      lines_(harts, false) {
  if (sources < 2 || sources > 1024)
    throw std::invalid_argument(fmt::format("APLIC source count {} outside [2,1024]", sources));
  if (kIdc + kIdcStride * harts > kIdc + 0x4000) throw std::invalid_argument("too many harts for APLIC IDCs");
}

Addr Aplic::size() const { return kIdc + 0x4000; }

void Aplic::check_source(SourceId source) const {
  if (source == 0 || source >= active_.size())
    throw std::out_of_range(fmt::format("APLIC source {} outside [1,{})", source, active_.size()));
}

void Aplic::set_mode(AplicMode mode) {
  mode_ = mode;
  update_lines();
}

void Aplic::configure(SourceId source, AplicTarget target) {
  check_source(source);
  if (target.hart >= harts_) throw std::out_of_range(fmt::format("APLIC target hart {} does not exist", target.hart));
  if (target.priority == 0) target.priority = 1;
  targets_[source] = target;
  active_[source] = true;
  set_enabled(source, true);
}

void Aplic::set_enabled(SourceId source, bool enabled) {
  check_source(source);
  enabled_[source] = enabled;
  if (enabled && mode_ == AplicMode::Msi && pending_[source]) {
    pending_[source] = false;
    deliver(source);
  }
  update_lines();
}

void Aplic::deliver(SourceId source) {
  const AplicTarget& t = targets_[source];
  ++counters_.msi_forwards;
  if (imsic_ != nullptr) imsic_->msi_write(t.hart, t.level, t.identity);
}

void Aplic::route(SourceId source) {
  check_source(source);
  if (!active_[source]) {
    ++counters_.unconfigured;
    diagnostics_.push_back(fmt::format("source {} asserted but not configured", source));
    return;
  }
  if (mode_ == AplicMode::Msi) {
    if (enabled_[source])
      deliver(source);
    else
      pending_[source] = true;
    return;
  }
  if (pending_[source] || latched_[source]) {
    ++counters_.direct.coalesced;
    return;
  }
  ++counters_.direct.assertions;
  if (claimed_[source])
    latched_[source] = true;
  else
    pending_[source] = true;
  update_lines();
}

SourceId Aplic::best(HartId hart) const {
  if (mode_ != AplicMode::Direct) return 0;
  const std::uint32_t threshold = idc_threshold_.at(hart);
  SourceId best = 0;
  std::uint32_t best_priority = 0;
  for (SourceId s = 1; s < active_.size(); ++s) {
    if (!pending_[s] || !enabled_[s] || targets_[s].hart != hart) continue;
    const std::uint32_t p = targets_[s].priority;
    if (threshold != 0 && p >= threshold) continue;
    if (best == 0 || p < best_priority) {
      best = s;
      best_priority = p;
    }
  }
  return best;
}

SourceId Aplic::claim(HartId hart) {
  const SourceId s = best(hart);
  if (s == 0) {
    ++counters_.direct.empty_claims;
    return 0;
  }
  pending_[s] = false;
  claimed_[s] = true;
  in_service_[hart].insert(s);
  ++counters_.direct.claims;
  update_lines();
  return s;
}

void Aplic::complete(HartId hart, SourceId source) {
  auto& service = in_service_.at(hart);
  if (source == 0 || service.erase(source) == 0) {
    ++counters_.direct.protocol_violations;
    diagnostics_.push_back(fmt::format("complete of source {} not in service on hart {}", source, hart));
    return;
  }
  claimed_[source] = false;
  ++counters_.direct.completions;
  if (latched_[source]) {
    latched_[source] = false;
    pending_[source] = true;
  }
  update_lines();
}

void Aplic::update_lines() {
  for (HartId h = 0; h < harts_; ++h) {
    const bool level = idc_delivery_[h] && best(h) != 0;
    if (level == lines_[h]) continue;
    lines_[h] = level;
    if (line_) line_(h, irq::kSei, level);
  }
}

AplicRegister Aplic::decode(Addr offset) const {
  AplicRegister r;
  const auto sources = static_cast<Addr>(active_.size());
  if (offset % 4 != 0) return r;
  if (offset == kDomaincfg) {
    r.kind = AplicRegister::Kind::Domaincfg;
  } else if (offset < 4 * sources) {
    r.kind = AplicRegister::Kind::Sourcecfg;
    r.source = static_cast<SourceId>(offset / 4);
  } else if (offset == kSetipnum) {
    r.kind = AplicRegister::Kind::Setipnum;
  } else if (offset == kSetienum) {
    r.kind = AplicRegister::Kind::Setienum;
  } else if (offset == kClrienum) {
    r.kind = AplicRegister::Kind::Clrienum;
  } else if (offset >= kTarget && offset < kTarget + 4 * (sources - 1)) {
    r.kind = AplicRegister::Kind::Target;
    r.source = static_cast<SourceId>((offset - kTarget) / 4 + 1);
  } else if (offset >= kIdc && offset < kIdc + kIdcStride * harts_) {
    r.hart = static_cast<HartId>((offset - kIdc) / kIdcStride);
    switch ((offset - kIdc) % kIdcStride) {
      case kIdcDelivery: r.kind = AplicRegister::Kind::IdcDelivery; break;
      case kIdcForce: r.kind = AplicRegister::Kind::IdcForce; break;
      case kIdcThreshold: r.kind = AplicRegister::Kind::IdcThreshold; break;
      case kIdcTopi: r.kind = AplicRegister::Kind::IdcTopi; break;
      case kIdcClaimi: r.kind = AplicRegister::Kind::IdcClaimi; break;
      default: break;
    }
  }
  return r;
}

namespace {

Word encode_target(const AplicTarget& t, AplicMode mode) {
  if (mode == AplicMode::Direct) return (Word{t.hart} << 18) | t.priority;
  const Word guest = t.level == IrqLevel::VS ? 1 : 0;
  return (Word{t.hart} << 18) | (guest << 12) | t.identity;
}

}  // namespace

OpResult Aplic::read(HartId, Addr offset) {
  const AplicRegister r = decode(offset);
  switch (r.kind) {
    case AplicRegister::Kind::Domaincfg:
      return {(Word{1} << 8) | (mode_ == AplicMode::Msi ? Word{1} << 2 : 0)};
    case AplicRegister::Kind::Sourcecfg:
      return {active_[r.source] ? 4u : 0u};
    case AplicRegister::Kind::Setipnum:
    case AplicRegister::Kind::Setienum:
    case AplicRegister::Kind::Clrienum:
      return {0};
    case AplicRegister::Kind::Target:
      return {encode_target(targets_[r.source], mode_)};
    case AplicRegister::Kind::IdcDelivery:
      return {idc_delivery_[r.hart] ? 1u : 0u};
    case AplicRegister::Kind::IdcForce:
      return {0};
    case AplicRegister::Kind::IdcThreshold:
      return {idc_threshold_[r.hart]};
    case AplicRegister::Kind::IdcTopi: {
      const SourceId s = best(r.hart);
      return {s == 0 ? 0 : (Word{s} << 16) | targets_[s].priority};
    }
    case AplicRegister::Kind::IdcClaimi: {
      const SourceId s = claim(r.hart);
      return {s == 0 ? 0 : (Word{s} << 16) | targets_[s].priority};
    }
    case AplicRegister::Kind::Invalid:
      break;
  }
  return OpResult::invalid();
}

OpResult Aplic::write(HartId, Addr offset, Word value) {
  const AplicRegister r = decode(offset);
  switch (r.kind) {
    case AplicRegister::Kind::Domaincfg:
      set_mode((value >> 2) & 1u ? AplicMode::Msi : AplicMode::Direct);
      return {};
    case AplicRegister::Kind::Sourcecfg:
      active_[r.source] = value != 0;
      update_lines();
      return {};
    case AplicRegister::Kind::Setipnum:
      if (value == 0 || value >= active_.size()) return OpResult::invalid();
      route(static_cast<SourceId>(value));
      return {};
    case AplicRegister::Kind::Setienum:
    case AplicRegister::Kind::Clrienum:
      if (value == 0 || value >= active_.size()) return OpResult::invalid();
      set_enabled(static_cast<SourceId>(value), r.kind == AplicRegister::Kind::Setienum);
      return {};
    case AplicRegister::Kind::Target: {
      AplicTarget t = targets_[r.source];
      t.hart = static_cast<HartId>(value >> 18);
      if (t.hart >= harts_) return OpResult::invalid();
      if (mode_ == AplicMode::Direct) {
        t.priority = static_cast<std::uint32_t>(value & 0xFF);
        if (t.priority == 0) t.priority = 1;
      } else {
        t.level = ((value >> 12) & 0x3F) != 0 ? IrqLevel::VS : IrqLevel::S;
        t.identity = static_cast<Identity>(value & 0x7FF);
      }
      targets_[r.source] = t;
      update_lines();
      return {};
    }
    case AplicRegister::Kind::IdcDelivery:
      idc_delivery_[r.hart] = (value & 1u) != 0;
      update_lines();
      return {};
    case AplicRegister::Kind::IdcForce:
      return {};
    case AplicRegister::Kind::IdcThreshold:
      idc_threshold_[r.hart] = static_cast<std::uint32_t>(value & 0xFF);
      update_lines();
      return {};
    case AplicRegister::Kind::IdcTopi:
      return OpResult::invalid();
    case AplicRegister::Kind::IdcClaimi:
      complete(r.hart, static_cast<SourceId>(value));
      return {};
    case AplicRegister::Kind::Invalid:
      break;
  }
  return OpResult::invalid();
}

PageScope Aplic::page_scope(Addr page_offset) const {
  const Addr page = page_of(page_offset);
  if (page < kIdc) return PageScope::global_page();
  HartMask harts;
  for (HartId h = 0; h < harts_; ++h) {
    if (page_of(kIdc + kIdcStride * h) == page) harts.insert(h);
  }
  return harts.empty() ? PageScope::machine_page() : PageScope::of_harts(harts);
}

}  // namespace partsim
