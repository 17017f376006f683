// SPDX-License-Identifier: Apache-2.0
#include "partsim/guests/programs.hpp"

#include <fmt/core.h>

namespace partsim {

namespace {

[[noreturn]] void unexpected_trap(HartContext& ctx, const TrapRecord& record, std::string_view who) {
  throw SimulationError(fmt::format("{} guest on hart {} got unexpected {}", who, ctx.hart(), to_string(record.cause)));
}

}  // namespace

void raise_source(DeviceBus& bus, IrqChip chip, SourceId source) {
  if (chip == IrqChip::PlicClint)
    bus.plic().core().raise(source);
  else
    bus.aplic().route(source);
}

// ---------------------------------------------------------------------------

TimerJitterGuest::TimerJitterGuest(GuestEnv env, std::uint64_t iterations, Cycles period)
    : env_(env), period_(period), log_(iterations) {
  if (period == 0) throw std::invalid_argument("timer period must be positive");
}

void TimerJitterGuest::boot(HartContext& ctx) {
  ctx.machine().set_enabled(ctx.hart(), Interrupt{IrqType::Timer, env_.level()}, true);
  ctx.set_interrupts_enabled(true);
  if (log_.done()) {
    disarmed_ = true;
    return;
  }
  arm(ctx);
}

void TimerJitterGuest::arm(HartContext& ctx) {
  start_ = TrapSnapshot::take(ctx.machine());
  deadline_ = ctx.now() + period_;
  ctx.ecall(SbiCall::set_timer(ctx.hart(), deadline_));
}

void TimerJitterGuest::on_trap(HartContext& ctx, const TrapRecord& record) {
  const auto* irq = std::get_if<Interrupt>(&record.cause);
  if (irq == nullptr || irq->type != IrqType::Timer) unexpected_trap(ctx, record, "timer");
  log_.record(ctx.now() - deadline_, start_, TrapSnapshot::take(ctx.machine()));
  if (log_.done()) {
    ctx.ecall(SbiCall::set_timer(ctx.hart(), SimTime::max()), [this](HartContext&, OpResult) { disarmed_ = true; });
  } else {
    arm(ctx);
  }
  ctx.trap_return();
}

// ---------------------------------------------------------------------------

void IpiTransport::prepare(HartContext& ctx) {
  if (uses_msi()) env_.bus->imsic().set_enabled(ctx.hart(), env_.level(), kIpiIdentity, true);
}

void IpiTransport::send(HartContext& ctx, HartId to, std::uint64_t number) {
  const HartId self = ctx.hart();
  if (uses_msi()) {
    const Addr file = env_.bus->imsic_addr(env_.bus->imsic().file_offset(to, env_.level()));
    ctx.mmio_write(file + Imsic::kSetEipNum, kIpiIdentity);
    return;
  }
  Mailbox* mailbox = env_.mailbox;
  ctx.memory(1);
  ctx.local(ctx.costs().mailbox_cost,
            [mailbox, self, to, number](HartContext&, OpResult) { mailbox->post(self, to, number); });
  if (env_.irqchip == IrqChip::AiaDirect && !ctx.machine().virtualized()) {
    ctx.mmio_write(env_.bus->sswi_addr(Sswi::kSetssip + 4 * Addr{to}), 1);
  } else {
    ctx.ecall(SbiCall::send_ipi(self, HartMask::single(to)));
  }
}

void IpiTransport::receive(HartContext& ctx, HartId from, std::function<void(HartContext&, std::uint64_t)> then) {
  const HartId self = ctx.hart();
  Machine* machine = &ctx.machine();
  const IrqLevel level = env_.level();
  if (uses_msi()) {
    const Interrupt ext{IrqType::External, level};
    Imsic* imsic = &env_.bus->imsic();
    ctx.poll([machine, self, ext] { return machine->pending(self, ext); });
    ctx.local(ctx.costs().csr_cost, [imsic, self, level, then = std::move(then)](HartContext& c, OpResult) {
      then(c, imsic->claim_top(self, level));
    });
    return;
  }
  const Interrupt sw{IrqType::Software, level};
  Mailbox* mailbox = env_.mailbox;
  ctx.poll([machine, self, sw] { return machine->pending(self, sw); });
  ctx.local(ctx.costs().csr_cost, [sw](HartContext& c, OpResult) { c.machine().clear_pending(c.hart(), sw); });
  ctx.memory(1);
  ctx.local(ctx.costs().mailbox_cost, [mailbox, from, self, then = std::move(then)](HartContext& c, OpResult) {
    const auto number = mailbox->take(from, self);
    if (!number) throw SimulationError(fmt::format("hart {} woke without a mailbox entry from hart {}", self, from));
    then(c, *number);
  });
}

IpiSenderGuest::IpiSenderGuest(GuestEnv env, HartId peer, std::uint64_t iterations)
    : env_(env), transport_(env), peer_(peer), log_(iterations) {}

void IpiSenderGuest::boot(HartContext& ctx) {
  if (peer_ == ctx.hart()) throw std::invalid_argument("IPI peer must differ from the sender");
  transport_.prepare(ctx);
  if (!log_.done()) iterate(ctx);
}

void IpiSenderGuest::iterate(HartContext& ctx) {
  t0_ = ctx.now();
  start_ = TrapSnapshot::take(ctx.machine());
  const std::uint64_t number = transport_.uses_msi() ? IpiTransport::kIpiIdentity : log_.next_iteration() + 1;
  transport_.send(ctx, peer_, number);
  transport_.receive(ctx, peer_, [this, number](HartContext& c, std::uint64_t echoed) {
    if (echoed != number) ++mismatches_;
    log_.record(c.now() - t0_, start_, TrapSnapshot::take(c.machine()));
    if (!log_.done()) iterate(c);
  });
}

void IpiSenderGuest::on_trap(HartContext& ctx, const TrapRecord& record) { unexpected_trap(ctx, record, "ipi"); }

IpiEchoGuest::IpiEchoGuest(GuestEnv env, HartId peer, std::uint64_t echoes)
    : env_(env), transport_(env), peer_(peer), echoes_(echoes) {}

void IpiEchoGuest::boot(HartContext& ctx) {
  transport_.prepare(ctx);
  if (echoes_ > 0) serve(ctx);
}

void IpiEchoGuest::serve(HartContext& ctx) {
  transport_.receive(ctx, peer_, [this](HartContext& c, std::uint64_t number) {
    transport_.send(c, peer_, number);
    if (++echoed_ < echoes_) serve(c);
  });
}

void IpiEchoGuest::on_trap(HartContext& ctx, const TrapRecord& record) { unexpected_trap(ctx, record, "echo"); }

// ---------------------------------------------------------------------------

PlicPathGuest::PlicPathGuest(GuestEnv env, HartId hart, SourceId source, std::uint64_t iterations, Cycles period)
    : env_(env), hart_(hart), source_(source), period_(period), log_(iterations) {
  if (period == 0) throw std::invalid_argument("interrupt period must be positive");
}

void PlicPathGuest::boot(HartContext& ctx) {
  if (ctx.hart() != hart_) throw std::invalid_argument("external interrupt guest booted on the wrong hart");
  if (env_.irqchip == IrqChip::AiaMsi) env_.bus->imsic().set_enabled(hart_, env_.level(), source_, true);
  ctx.machine().set_enabled(hart_, Interrupt{IrqType::External, env_.level()}, true);
  ctx.set_interrupts_enabled(true);
  if (!log_.done()) schedule_next(ctx.now());
}

void PlicPathGuest::schedule_next(SimTime now) {
  env_.platform->queue().schedule(now + period_, Action{Target::Source, 0, hart_, source_});
}

void PlicPathGuest::fire() {
  Platform& p = *env_.platform;
  asserted_ = p.now();
  start_ = TrapSnapshot::take(p.machine());
  if (p.trace().enabled()) p.trace().record(p.now(), hart_, TraceKind::IrqAssert, fmt::format("source {}", source_));
  raise_source(*env_.bus, env_.irqchip, source_);
}

void PlicPathGuest::on_trap(HartContext& ctx, const TrapRecord& record) {
  const auto* irq = std::get_if<Interrupt>(&record.cause);
  if (irq == nullptr || irq->type != IrqType::External) unexpected_trap(ctx, record, "external");
  injection_ = ctx.now() - asserted_;
  const SimTime t1 = ctx.now();
  const SourceId expected = source_;

  if (env_.irqchip == IrqChip::AiaMsi) {
    Imsic* imsic = &env_.bus->imsic();
    const IrqLevel level = env_.level();
    ctx.local(ctx.costs().csr_cost, [this, imsic, level, t1, expected](HartContext& c, OpResult) {
      const Identity id = imsic->claim_top(c.hart(), level);
      if (id != expected) throw SimulationError(fmt::format("claimed identity {} instead of {}", id, expected));
      finish(c, c.now() - t1, 0);
    });
    ctx.trap_return();
    return;
  }

  const bool plic = env_.irqchip == IrqChip::PlicClint;
  const Addr reg = plic ? env_.bus->plic_addr(env_.bus->plic().claim_offset(Plic::s_context(hart_)))
                        : env_.bus->aplic_addr(env_.bus->aplic().claimi_offset(hart_));
  ctx.mmio_read(reg, [this, reg, plic, t1, expected](HartContext& c, OpResult r) {
    const Cycles claim = c.now() - t1;
    const auto id = static_cast<SourceId>(plic ? r.value : r.value >> 16);
    if (!r.ok() || id != expected)
      throw SimulationError(fmt::format("claim returned {} ({}) instead of {}", id, to_string(r.status), expected));
    const SimTime t2 = c.now();
    c.mmio_write(reg, id, [this, claim, t2](HartContext& c2, OpResult w) {
      if (!w.ok()) throw SimulationError(fmt::format("complete failed: {}", to_string(w.status)));
      finish(c2, claim, c2.now() - t2);
    });
  });
  ctx.trap_return();
}

void PlicPathGuest::finish(HartContext& ctx, Cycles claim, Cycles complete) {
  log_.record(claim, start_, TrapSnapshot::take(ctx.machine()), PhaseBreakdown{injection_, claim, complete});
  if (!log_.done()) schedule_next(ctx.now());
}

// ---------------------------------------------------------------------------

SyncTrapGuest::SyncTrapGuest(GuestEnv env, std::uint64_t iterations) : env_(env), log_(iterations) {}

void SyncTrapGuest::boot(HartContext& ctx) {
  if (!log_.done()) iterate(ctx);
}

void SyncTrapGuest::iterate(HartContext& ctx) {
  const SimTime t0 = ctx.now();
  const TrapSnapshot start = TrapSnapshot::take(ctx.machine());
  ctx.ecall(SbiCall::rfence(ctx.hart(), HartMask::single(ctx.hart())),
            [this, t0, start](HartContext& c, OpResult r) {
              if (!r.ok()) throw SimulationError(fmt::format("rfence failed: {}", to_string(r.status)));
              log_.record(c.now() - t0, start, TrapSnapshot::take(c.machine()));
              if (!log_.done()) iterate(c);
            });
}

void SyncTrapGuest::on_trap(HartContext& ctx, const TrapRecord& record) { unexpected_trap(ctx, record, "sync"); }

}  // namespace partsim
