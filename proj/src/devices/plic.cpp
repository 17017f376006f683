// SPDX-License-Identifier: Apache-2.0
#include "partsim/devices/plic.hpp"

#include <stdexcept>

#include <fmt/core.h>

namespace partsim {

PlicCore::PlicCore(unsigned sources, unsigned contexts)
    : priority_(sources, 0),
      pending_(sources, false),
      claimed_(sources, false),
      latched_(sources, false),
      enable_(contexts, std::vector<bool>(sources, false)),
      threshold_(contexts, 0),
      in_service_(contexts) {
  if (sources < 2 || sources > 1024)
    throw std::invalid_argument(fmt::format("PLIC source count {} outside [2,1024]", sources));
  if (contexts == 0) throw std::invalid_argument("PLIC needs at least one context");
}

void PlicCore::check_source(SourceId source) const {
  if (source == 0 || source >= priority_.size())
    throw std::out_of_range(fmt::format("PLIC source {} outside [1,{})", source, priority_.size()));
}

void PlicCore::raise(SourceId source) {
  check_source(source);
  if (pending_[source] || latched_[source]) {
    ++counters_.coalesced;
    return;
  }
  ++counters_.assertions;
  if (claimed_[source])
    latched_[source] = true;
  else
    pending_[source] = true;
  changed();
}

SourceId PlicCore::best(ContextId context) const {
  const auto& en = enable_.at(context);
  const std::uint32_t threshold = threshold_[context];
  SourceId best = 0;
  std::uint32_t best_priority = 0;
  for (SourceId s = 1; s < priority_.size(); ++s) {
    if (!pending_[s] || !en[s] || priority_[s] <= threshold) continue;
    if (best == 0 || priority_[s] > best_priority) {
      best = s;
      best_priority = priority_[s];
    }
  }
  return best;
}

SourceId PlicCore::claim(ContextId context) {
  const SourceId s = best(context);
  if (s == 0) {
    ++counters_.empty_claims;
    return 0;
  }
  pending_[s] = false;
  claimed_[s] = true;
  in_service_[context].insert(s);
  ++counters_.claims;
  changed();
  return s;
}

void PlicCore::complete(ContextId context, SourceId source) {
  auto& service = in_service_.at(context);
  if (source == 0 || service.erase(source) == 0) {
    ++counters_.protocol_violations;
    violations_.push_back(fmt::format("complete of source {} not in service on context {}", source, context));
    return;
  }
  claimed_[source] = false;
  ++counters_.completions;
  if (latched_[source]) {
    latched_[source] = false;
    pending_[source] = true;
  }
  changed();
}

void PlicCore::set_priority(SourceId source, std::uint32_t priority) {
  check_source(source);
  priority_[source] = priority;
  changed();
}

void PlicCore::force_pending(SourceId source, bool pending) {
  check_source(source);
  pending_[source] = pending;
  changed();
}

void PlicCore::set_enabled(ContextId context, SourceId source, bool enabled) {
  if (source == 0) return;
  check_source(source);
  enable_.at(context)[source] = enabled;
  changed();
}

void PlicCore::set_threshold(ContextId context, std::uint32_t threshold) {
  threshold_.at(context) = threshold;
  changed();
}

void PlicLayout::validate(unsigned sources, unsigned contexts) const {
  const Addr words = (sources + 31) / 32;
  if (enable_stride < 4 * words) throw std::invalid_argument("PLIC enable stride smaller than one enable block");
  if (pending + 4 * words > enable && pending < enable)
    throw std::invalid_argument("PLIC pending block overlaps enables");
  if (priority + 4 * sources > pending && priority < pending)
    throw std::invalid_argument("PLIC priority block overlaps pending");
  if (enable + enable_stride * contexts > context) throw std::invalid_argument("PLIC enables overlap contexts");
  if (context_stride < 8) throw std::invalid_argument("PLIC context stride too small");
  if (context + context_stride * contexts > size) throw std::invalid_argument("PLIC contexts exceed region size");
}

Plic::Plic(unsigned harts, unsigned sources, PlicLayout layout, IrqLine line)
    : layout_(layout), core_(sources, 2 * harts), line_(std::move(line)), lines_(2 * harts, false) {
  layout_.validate(sources, 2 * harts);
  core_.set_change_listener([this] { update_lines(); });
}

void Plic::update_lines() {
  for (ContextId c = 0; c < lines_.size(); ++c) {
    const bool level = core_.line(c);
    if (level == lines_[c]) continue;
    lines_[c] = level;
    if (line_) line_(context_hart(c), is_s_context(c) ? irq::kSei : irq::kMei, level);
  }
}

PlicRegister Plic::decode(Addr offset) const {
  PlicRegister r;
  const unsigned sources = core_.sources();
  const unsigned contexts = core_.contexts();
  const Addr words = (sources + 31) / 32;
  if (offset % 4 != 0) return r;
  if (offset >= layout_.priority && offset < layout_.priority + 4 * sources) {
    r.kind = PlicRegister::Kind::Priority;
    r.source = static_cast<SourceId>((offset - layout_.priority) / 4);
    return r;
  }
  if (offset >= layout_.pending && offset < layout_.pending + 4 * words) {
    r.kind = PlicRegister::Kind::Pending;
    r.word = static_cast<unsigned>((offset - layout_.pending) / 4);
    return r;
  }
  if (offset >= layout_.enable && offset < layout_.enable + layout_.enable_stride * contexts) {
    const Addr rel = offset - layout_.enable;
    const Addr in_block = rel % layout_.enable_stride;
    if (in_block >= 4 * words) return r;
    r.kind = PlicRegister::Kind::Enable;
    r.context = static_cast<ContextId>(rel / layout_.enable_stride);
    r.word = static_cast<unsigned>(in_block / 4);
    return r;
  }
  if (offset >= layout_.context && offset < layout_.context + layout_.context_stride * contexts) {
    const Addr rel = offset - layout_.context;
    const Addr in_block = rel % layout_.context_stride;
    r.context = static_cast<ContextId>(rel / layout_.context_stride);
    if (in_block == 0) r.kind = PlicRegister::Kind::Threshold;
    if (in_block == 4) r.kind = PlicRegister::Kind::ClaimComplete;
    return r;
  }
  return r;
}

OpResult Plic::read(HartId, Addr offset) {
  const PlicRegister r = decode(offset);
  switch (r.kind) {
    case PlicRegister::Kind::Priority:
      return {r.source == 0 ? 0u : core_.priority(r.source)};
    case PlicRegister::Kind::Pending: {
      Word v = 0;
      for (unsigned b = 0; b < 32; ++b) {
        const SourceId s = r.word * 32 + b;
        if (s != 0 && s < core_.sources() && core_.pending(s)) v |= Word{1} << b;
      }
      return {v};
    }
    case PlicRegister::Kind::Enable: {
      Word v = 0;
      for (unsigned b = 0; b < 32; ++b) {
        const SourceId s = r.word * 32 + b;
        if (s != 0 && s < core_.sources() && core_.enabled(r.context, s)) v |= Word{1} << b;
      }
      return {v};
    }
    case PlicRegister::Kind::Threshold:
      return {core_.threshold(r.context)};
    case PlicRegister::Kind::ClaimComplete:
      return {core_.claim(r.context)};
    case PlicRegister::Kind::Invalid:
      break;
  }
  return OpResult::invalid();
}

OpResult Plic::write(HartId, Addr offset, Word value) {
  const PlicRegister r = decode(offset);
  switch (r.kind) {
    case PlicRegister::Kind::Priority:
      if (r.source != 0) core_.set_priority(r.source, static_cast<std::uint32_t>(value));
      return {};
    case PlicRegister::Kind::Pending:
      return OpResult::invalid();
    case PlicRegister::Kind::Enable:
      for (unsigned b = 0; b < 32; ++b) {
        const SourceId s = r.word * 32 + b;
        if (s != 0 && s < core_.sources()) core_.set_enabled(r.context, s, ((value >> b) & 1u) != 0);
      }
      return {};
    case PlicRegister::Kind::Threshold:
      core_.set_threshold(r.context, static_cast<std::uint32_t>(value));
      return {};
    case PlicRegister::Kind::ClaimComplete:
      core_.complete(r.context, static_cast<SourceId>(value));
      return {};
    case PlicRegister::Kind::Invalid:
      break;
  }
  return OpResult::invalid();
}

PageScope Plic::page_scope(Addr page_offset) const {
  const Addr lo = page_of(page_offset);
  const Addr hi = lo + kPageSize;
  const auto overlaps = [&](Addr a, Addr b) { return a < hi && lo < b; };
  const unsigned sources = core_.sources();
  const unsigned contexts = core_.contexts();
  const Addr words = (sources + 31) / 32;

  PageScope scope;
  if (overlaps(layout_.priority, layout_.priority + 4 * sources)) scope.global = true;
  if (overlaps(layout_.pending, layout_.pending + 4 * words)) scope.global = true;
  for (ContextId c = 0; c < contexts; ++c) {
    const Addr e = layout_.enable + layout_.enable_stride * c;
    const Addr t = layout_.context + layout_.context_stride * c;
    const bool on_enable = overlaps(e, e + 4 * words);
    const bool on_context = overlaps(t, t + 8);
    if (!on_enable && !on_context) continue;
    if (!is_s_context(c)) {
      scope.machine = true;
      continue;
    }
    scope.harts.insert(context_hart(c));
    if (on_context && layout_.claim_pages_shared) scope.global = true;
  }
  return scope;
}

}  // namespace partsim
