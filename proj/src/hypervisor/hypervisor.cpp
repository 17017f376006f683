// SPDX-License-Identifier: Apache-2.0
#include "partsim/hypervisor/hypervisor.hpp"

#include <fmt/core.h>

namespace partsim {

InterventionCounter InterventionCounter::operator-(const InterventionCounter& o) const {
  return {sbi_moderation - o.sbi_moderation, timer_injection - o.timer_injection, ipi_injection - o.ipi_injection,
          external_injection - o.external_injection, plic_emulation - o.plic_emulation, denied - o.denied,
          other - o.other};
}

std::string_view to_string(HvAction::Kind kind) {
  switch (kind) {
    case HvAction::Kind::Inject: return "inject";
    case HvAction::Kind::EmulateMmio: return "emulate_mmio";
    case HvAction::Kind::ForwardSbi: return "forward_sbi";
    case HvAction::Kind::Deny: return "deny";
    case HvAction::Kind::Unattributed: return "unattributed";
  }
  return "?";
}

Hypervisor::Hypervisor(Platform& platform, DeviceBus& bus, HypervisorConfig config)
    : platform_(platform), bus_(bus), config_(std::move(config)) {
  Machine& m = platform_.machine();
  if (!m.virtualized()) throw std::invalid_argument("hypervisor needs a virtualized machine");
  Cell root;
  root.id = kRootCell;
  root.name = "root";
  root.harts = HartMask::first(m.size());
  root.memory = config_.memory;
  for (SourceId s = 1; s < bus_.plic().core().sources(); ++s) root.irq_sources.insert(s);
  root.state = CellState::Running;
  cells_.emplace(kRootCell, std::move(root));
  for (HartId h = 0; h < m.size(); ++h) {
    m.set_enabled(h, irq::kSti, true);
    m.set_enabled(h, irq::kSsi, true);
    m.set_enabled(h, irq::kSei, true);
    platform_.set_translation(h, Translation{2, false});
  }
  apply_ownership();
}

const Cell& Hypervisor::cell(CellId id) const {
  auto it = cells_.find(id);
  if (it == cells_.end()) throw CellError(fmt::format("no cell {}", id));
  return it->second;
}

Cell& Hypervisor::mutable_cell(CellId id) {
  auto it = cells_.find(id);
  if (it == cells_.end()) throw CellError(fmt::format("no cell {}", id));
  return it->second;
}

const Cell* Hypervisor::cell_of_hart(HartId hart) const {
  for (const auto& [id, c] : cells_) {
    if (c.harts.contains(hart)) return &c;
  }
  return nullptr;
}

void Hypervisor::require_partitioning(std::string_view what) const {
  if (phase_ != HvPhase::Partitioning) throw CellError(fmt::format("{} rejected in operational phase", what));
}

void Hypervisor::apply_ownership() {
  Machine& m = platform_.machine();
  for (HartId h = 0; h < m.size(); ++h) {
    const Cell* c = cell_of_hart(h);
    m.hart(h).owner = c ? std::optional<CellId>(c->id) : std::nullopt;
  }
  bus_.recompute_ownership();
}

CellId Hypervisor::create_cell(const CellConfig& config) {
  require_partitioning("create_cell");
  Cell& root = mutable_cell(kRootCell);
  if (config.name.empty()) throw CellError("cell name is empty");
  for (const auto& [id, c] : cells_) {
    if (c.name == config.name) throw CellError(fmt::format("cell name '{}' already in use", config.name));
  }
  if (config.harts.empty()) throw CellError(fmt::format("cell '{}' has no harts", config.name));
  if (!config.harts.subset_of(root.harts))
    throw CellError(fmt::format("cell '{}': harts not owned by the root cell", config.name));
  RangeSet memory = root.memory;
  for (const MemRange& r : config.memory) {
    if (!memory.covers(r))
      throw CellError(fmt::format("cell '{}': memory [{:#x},{:#x}) not owned by the root cell", config.name, r.base,
                                  r.end()));
    memory.subtract(r);
  }
  for (SourceId s : config.irq_sources) {
    if (!root.owns_source(s))
      throw CellError(fmt::format("cell '{}': irq source {} not owned by the root cell", config.name, s));
  }
  if (config.harts == root.harts) throw CellError("the root cell must keep at least one hart");

  Cell cell;
  cell.id = next_id_++;
  cell.name = config.name;
  cell.harts = config.harts;
  for (const MemRange& r : config.memory) cell.memory.add(r);
  cell.irq_sources = config.irq_sources;
  cell.comm_page = config.comm_page;
  cell.hugepage_gstage = config.hugepage_gstage;
  cell.state = CellState::Created;

  root.harts = root.harts.minus(config.harts);
  root.memory = std::move(memory);
  for (SourceId s : config.irq_sources) root.irq_sources.erase(s);
  for (HartId h : cell.harts.to_vector()) platform_.set_translation(h, Translation{2, cell.hugepage_gstage});
  const CellId id = cell.id;
  cells_.emplace(id, std::move(cell));
  apply_ownership();
  return id;
}

void Hypervisor::start_cell(CellId id) {
  require_partitioning("start_cell");
  if (id == kRootCell) throw CellError("the root cell is always running");
  Cell& c = mutable_cell(id);
  if (c.state == CellState::Running) throw CellError(fmt::format("cell '{}' already running", c.name));
  c.state = CellState::Running;
}

void Hypervisor::stop_cell(CellId id) {
  require_partitioning("stop_cell");
  if (id == kRootCell) throw CellError("the root cell cannot be stopped");
  Cell& c = mutable_cell(id);
  if (c.state != CellState::Running) throw CellError(fmt::format("cell '{}' is not running", c.name));
  c.state = CellState::Stopped;
}

void Hypervisor::destroy_cell(CellId id) {
  require_partitioning("destroy_cell");
  if (id == kRootCell) throw CellError("the root cell cannot be destroyed");
  Cell& c = mutable_cell(id);
  if (c.state == CellState::Running) throw CellError(fmt::format("cell '{}' must be stopped first", c.name));
  Cell& root = mutable_cell(kRootCell);
  root.harts = root.harts | c.harts;
  for (const MemRange& r : c.memory.ranges()) root.memory.add(r);
  root.irq_sources.insert(c.irq_sources.begin(), c.irq_sources.end());
  for (HartId h : c.harts.to_vector()) platform_.set_translation(h, Translation{2, false});
  cells_.erase(id);
  apply_ownership();
}

void Hypervisor::enter_operational() {
  require_partitioning("enter_operational");
  phase_ = HvPhase::Operational;
}

void Hypervisor::route_source(SourceId source, HartId hart, Identity msi_identity) {
  const Cell* c = cell_of_hart(hart);
  if (c == nullptr || !c->owns_source(source))
    throw CellError(fmt::format("source {} is not owned by the cell of hart {}", source, hart));
  route_wired_source(bus_, config_.irqchip, source, hart, IrqLevel::VS, msi_identity);
}

void Hypervisor::resolve(HvAction action) {
  ++action_counts_[static_cast<std::size_t>(action.kind)];
  last_action_ = std::move(action);
}

void Hypervisor::inject_irq(HartId hart, IrqType type) {
  const Interrupt irq{type, IrqLevel::VS};
  switch (type) {
    case IrqType::Timer: ++counters_.timer_injection; break;
    case IrqType::Software: ++counters_.ipi_injection; break;
    case IrqType::External: ++counters_.external_injection; break;
  }
  platform_.machine().set_pending(hart, irq);
  if (platform_.trace().enabled())
    platform_.trace().record(platform_.now(), hart, TraceKind::Injection, to_string(irq));
  resolve({HvAction::Kind::Inject, hart, irq, {}, {}});
}

void Hypervisor::on_trap(HartContext& ctx, const TrapRecord& record) {
  const HartId h = ctx.hart();
  const Cell* c = cell_of_hart(h);
  if (c == nullptr || c->state != CellState::Running) {
    if (const auto* irq = std::get_if<Interrupt>(&record.cause)) ctx.machine().set_enabled(h, *irq, false);
    unattributed(ctx, fmt::format("trap {} on hart {} outside a running cell", to_string(record.cause), h));
    return;
  }
  if (const auto* irq = std::get_if<Interrupt>(&record.cause)) {
    const Cycles cost = ctx.costs().hv_injection_cost;
    if (*irq == irq::kSti) {
      ctx.local(cost, [this](HartContext& x, OpResult) {
        x.machine().set_enabled(x.hart(), irq::kSti, false);
        inject_irq(x.hart(), IrqType::Timer);
      });
    } else if (*irq == irq::kSsi) {
      ctx.local(cost, [this](HartContext& x, OpResult) {
        x.machine().clear_pending(x.hart(), irq::kSsi);
        inject_irq(x.hart(), IrqType::Software);
      });
    } else if (*irq == irq::kSei) {
      ctx.local(cost, [this](HartContext& x, OpResult) {
        x.machine().set_enabled(x.hart(), irq::kSei, false);
        inject_irq(x.hart(), IrqType::External);
      });
    } else {
      // masked so that an unhandled level-triggered line cannot trap forever
      ctx.machine().set_enabled(h, *irq, false);
      unattributed(ctx, fmt::format("unexpected interrupt {} on hart {}", to_string(*irq), h));
      return;
    }
    ctx.trap_return();
    return;
  }
  switch (std::get<Exception>(record.cause)) {
    case Exception::EcallFromVS: moderate_sbi(ctx); return;
    case Exception::GuestMmioFault: emulate_mmio(ctx); return;
    case Exception::EcallFromS: break;
  }
  unattributed(ctx, fmt::format("unexpected {} on hart {}", to_string(record.cause), h));
}

void Hypervisor::deny(HartContext& ctx, std::string reason) {
  ++counters_.denied;
  diagnostics_.push_back(reason);
  resolve({HvAction::Kind::Deny, ctx.hart(), {}, {}, std::move(reason)});
  ctx.local(ctx.costs().hv_moderation_cost);
  ctx.set_return(OpResult::denied());
  ctx.trap_return();
}

void Hypervisor::unattributed(HartContext& ctx, std::string reason) {
  ++counters_.other;
  diagnostics_.push_back(reason);
  resolve({HvAction::Kind::Unattributed, ctx.hart(), {}, {}, std::move(reason)});
  ctx.set_return(OpResult::invalid());
  ctx.trap_return();
}

void Hypervisor::moderate_sbi(HartContext& ctx) {
  const HartId h = ctx.hart();
  const Cell& c = *cell_of_hart(h);
  SbiCall call = ctx.sbi_call();
  call.caller = h;
  switch (call.function) {
    case SbiFunction::SetTimer:
      break;
    case SbiFunction::SendIpi:
    case SbiFunction::Rfence:
      if (!call.mask.subset_of(c.harts)) {
        deny(ctx, fmt::format("{} from hart {} targets harts outside cell '{}'", to_string(call.function), h, c.name));
        return;
      }
      break;
    case SbiFunction::HartStart:
    case SbiFunction::HartStop:
      if (phase_ == HvPhase::Operational) {
        deny(ctx, fmt::format("{} from hart {} in operational phase", to_string(call.function), h));
        return;
      }
      if (!c.harts.contains(call.target)) {
        deny(ctx, fmt::format("{} from hart {} targets hart {} outside cell '{}'", to_string(call.function), h,
                              call.target, c.name));
        return;
      }
      break;
  }

  ++counters_.sbi_moderation;
  resolve({HvAction::Kind::ForwardSbi, h, {}, {}, {}});
  const Cycles cost = ctx.costs().hv_moderation_cost;

  if (call.function == SbiFunction::SetTimer) {
    ctx.local(cost, [](HartContext& x, OpResult) { x.machine().clear_pending(x.hart(), irq::kVsti); });
    ctx.ecall(call, [](HartContext& x, OpResult r) {
      x.machine().set_enabled(x.hart(), irq::kSti, true);
      x.set_return(r);
    });
    ctx.trap_return();
    return;
  }
  if (call.function == SbiFunction::SendIpi && config_.hv_ipi_shortcut) {
    ctx.local(cost, [call](HartContext& x, OpResult) {
      for (HartId t : call.mask.to_vector()) x.machine().set_pending(t, irq::kVssi);
    });
    ctx.set_return({});
    ctx.trap_return();
    return;
  }
  if (call.function == SbiFunction::SendIpi && config_.irqchip == IrqChip::AiaDirect) {
    ctx.local(cost);
    for (HartId t : call.mask.to_vector()) ctx.mmio_write(bus_.sswi_addr(Sswi::kSetssip + 4 * Addr{t}), 1);
    ctx.set_return({});
    ctx.trap_return();
    return;
  }
  ctx.local(cost);
  ctx.ecall(call, [](HartContext& x, OpResult r) { x.set_return(r); });
  ctx.trap_return();
}

namespace {

std::uint64_t source_word_mask(const Cell& c, unsigned word) {
  std::uint64_t mask = 0;
  for (unsigned b = 0; b < 32; ++b) {
    if (c.owns_source(word * 32 + b)) mask |= std::uint64_t{1} << b;
  }
  return mask;
}

bool s_context_of_cell(const Cell& c, ContextId context) {
  return Plic::is_s_context(context) && c.harts.contains(Plic::context_hart(context));
}

}  // namespace

std::optional<std::string> Hypervisor::check_plic_access(HartId hart, const MmioRequest& request) const {
  const Cell* c = cell_of_hart(hart);
  if (c == nullptr) return fmt::format("hart {} belongs to no cell", hart);
  const auto resolved = bus_.resolve(request.addr);
  if (!resolved || resolved->device != &bus_.plic()) return "not a PLIC register";
  const PlicRegister r = bus_.plic().decode(resolved->offset);
  switch (r.kind) {
    case PlicRegister::Kind::Priority:
      if (!c->owns_source(r.source)) return fmt::format("priority of foreign source {}", r.source);
      return std::nullopt;
    case PlicRegister::Kind::Pending:
      if (request.is_write()) return "pending bits are read-only";
      return std::nullopt;
    case PlicRegister::Kind::Enable:
      if (!s_context_of_cell(*c, r.context)) return fmt::format("enable of foreign context {}", r.context);
      if (request.is_write() && (request.value & ~source_word_mask(*c, r.word) & 0xFFFFFFFFu) != 0)
        return fmt::format("enable of foreign sources in word {}", r.word);
      return std::nullopt;
    case PlicRegister::Kind::Threshold:
      if (!s_context_of_cell(*c, r.context)) return fmt::format("threshold of foreign context {}", r.context);
      return std::nullopt;
    case PlicRegister::Kind::ClaimComplete:
      if (!s_context_of_cell(*c, r.context)) return fmt::format("claim/complete of foreign context {}", r.context);
      if (request.is_write() && !c->owns_source(static_cast<SourceId>(request.value)))
        return fmt::format("complete of foreign source {}", request.value);
      return std::nullopt;
    case PlicRegister::Kind::Invalid:
      break;
  }
  return fmt::format("no PLIC register at {:#x}", request.addr);
}

std::optional<std::string> Hypervisor::check_aplic_access(HartId hart, const MmioRequest& request) const {
  const Cell* c = cell_of_hart(hart);
  if (c == nullptr) return fmt::format("hart {} belongs to no cell", hart);
  const auto resolved = bus_.resolve(request.addr);
  if (!resolved || resolved->device != &bus_.aplic()) return "not an APLIC register";
  const AplicRegister r = bus_.aplic().decode(resolved->offset);
  const auto own = [&](Word s) { return s <= 0xFFFFFFFFu && c->owns_source(static_cast<SourceId>(s)); };
  switch (r.kind) {
    case AplicRegister::Kind::Domaincfg:
      if (request.is_write()) return "domain configuration is reserved";
      return std::nullopt;
    case AplicRegister::Kind::Sourcecfg:
      if (!own(r.source)) return fmt::format("configuration of foreign source {}", r.source);
      return std::nullopt;
    case AplicRegister::Kind::Target:
      if (!own(r.source)) return fmt::format("target of foreign source {}", r.source);
      if (request.is_write() && !c->harts.contains(static_cast<HartId>(request.value >> 18)))
        return "target hart outside the cell";
      return std::nullopt;
    case AplicRegister::Kind::Setipnum:
    case AplicRegister::Kind::Setienum:
    case AplicRegister::Kind::Clrienum:
      if (request.is_write() && !own(request.value)) return fmt::format("foreign source {}", request.value);
      return std::nullopt;
    case AplicRegister::Kind::IdcDelivery:
    case AplicRegister::Kind::IdcForce:
    case AplicRegister::Kind::IdcThreshold:
    case AplicRegister::Kind::IdcTopi:
    case AplicRegister::Kind::IdcClaimi:
      if (!c->harts.contains(r.hart)) return fmt::format("IDC of foreign hart {}", r.hart);
      if (r.kind == AplicRegister::Kind::IdcClaimi && request.is_write() && !own(request.value))
        return fmt::format("complete of foreign source {}", request.value);
      return std::nullopt;
    case AplicRegister::Kind::Invalid:
      break;
  }
  return fmt::format("no APLIC register at {:#x}", request.addr);
}

void Hypervisor::emulate_mmio(HartContext& ctx) {
  const HartId h = ctx.hart();
  const MmioRequest req = ctx.fault();
  const auto resolved = bus_.resolve(req.addr);
  if (!resolved) {
    deny(ctx, fmt::format("hart {} access to unmapped {:#x}", h, req.addr));
    return;
  }
  const bool is_plic = resolved->device == &bus_.plic();
  const bool is_aplic = resolved->device == &bus_.aplic();
  if (!is_plic && !is_aplic) {
    deny(ctx, fmt::format("hart {} access to {} page at {:#x}", h, resolved->device->name(), req.addr));
    return;
  }
  const auto denial = is_plic ? check_plic_access(h, req) : check_aplic_access(h, req);
  if (denial) {
    deny(ctx, fmt::format("hart {}: {}", h, *denial));
    return;
  }

  ++counters_.plic_emulation;
  resolve({HvAction::Kind::EmulateMmio, h, {}, req, {}});
  const Cell& c = *cell_of_hart(h);

  // Post-processing tied to the claim/complete protocol: a successful claim
  // consumes the injected VS external interrupt, a completion re-arms the
  // supervisor external interrupt that was masked at injection time.
  HartId context_hart = h;
  bool claim_reg = false;
  unsigned pending_word = 0;
  bool pending_read = false;
  if (is_plic) {
    const PlicRegister r = bus_.plic().decode(resolved->offset);
    claim_reg = r.kind == PlicRegister::Kind::ClaimComplete;
    context_hart = Plic::context_hart(r.context);
    pending_read = r.kind == PlicRegister::Kind::Pending;
    pending_word = r.word;
  } else {
    const AplicRegister r = bus_.aplic().decode(resolved->offset);
    claim_reg = r.kind == AplicRegister::Kind::IdcClaimi;
    context_hart = r.hart;
  }
  const std::uint64_t mask = pending_read ? source_word_mask(c, pending_word) : 0;

  ctx.local(ctx.costs().hv_emulation_cost);
  const Continuation finish = [claim_reg, context_hart, pending_read, mask, req](HartContext& x, OpResult r) {
    if (claim_reg && !req.is_write() && r.value != 0) x.machine().clear_pending(context_hart, irq::kVsei);
    if (claim_reg && req.is_write()) x.machine().set_enabled(context_hart, irq::kSei, true);
    if (pending_read) r.value &= mask;
    x.set_return(r);
  };
  if (req.is_write())
    ctx.mmio_write(req.addr, req.value, finish);
  else
    ctx.mmio_read(req.addr, finish);
  ctx.trap_return();
}

}  // namespace partsim
