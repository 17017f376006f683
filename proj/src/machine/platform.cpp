// SPDX-License-Identifier: Apache-2.0
#include "partsim/machine/platform.hpp"

#include <stdexcept>

#include <fmt/core.h>

namespace partsim {

namespace {

constexpr std::uint32_t kKick = 0;
constexpr std::uint32_t kComplete = 1;

std::string trap_detail(const TrapRecord& r) {
  return fmt::format("{}->{} {}", to_string(r.from_mode), to_string(r.to_mode), to_string(r.cause));
}

}  // namespace

std::string_view to_string(OpStatus status) {
  switch (status) {
    case OpStatus::Ok: return "ok";
    case OpStatus::Denied: return "denied";
    case OpStatus::Invalid: return "invalid";
  }
  return "?";
}

std::string_view to_string(SbiFunction function) {
  switch (function) {
    case SbiFunction::SetTimer: return "set_timer";
    case SbiFunction::SendIpi: return "send_ipi";
    case SbiFunction::Rfence: return "rfence";
    case SbiFunction::HartStart: return "hart_start";
    case SbiFunction::HartStop: return "hart_stop";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// HartContext

SimTime HartContext::now() const { return platform_.now(); }
PrivilegeMode HartContext::mode() const { return platform_.machine().hart(hart_).mode; }
Machine& HartContext::machine() { return platform_.machine(); }
const CostModel& HartContext::costs() const { return platform_.costs(); }

void HartContext::local(Cycles cycles, Continuation then) {
  Platform::Op op;
  op.kind = Platform::OpKind::Local;
  op.cycles = cycles;
  op.then = std::move(then);
  platform_.issue(hart_, std::move(op));
}

void HartContext::memory(unsigned accesses, Continuation then) {
  Platform::Op op;
  op.kind = Platform::OpKind::Memory;
  op.accesses = accesses;
  op.then = std::move(then);
  platform_.issue(hart_, std::move(op));
}

void HartContext::mmio_read(Addr addr, Continuation then) {
  Platform::Op op;
  op.kind = Platform::OpKind::Mmio;
  op.mmio = {addr, AccessKind::Read, 0};
  op.then = std::move(then);
  platform_.issue(hart_, std::move(op));
}

void HartContext::mmio_write(Addr addr, Word value, Continuation then) {
  Platform::Op op;
  op.kind = Platform::OpKind::Mmio;
  op.mmio = {addr, AccessKind::Write, value};
  op.then = std::move(then);
  platform_.issue(hart_, std::move(op));
}

void HartContext::ecall(const SbiCall& call, Continuation then) {
  Platform::Op op;
  op.kind = Platform::OpKind::Ecall;
  op.call = call;
  op.then = std::move(then);
  platform_.issue(hart_, std::move(op));
}

void HartContext::poll(std::function<bool()> predicate, Continuation then) {
  Platform::Op op;
  op.kind = Platform::OpKind::Poll;
  op.predicate = std::move(predicate);
  op.then = std::move(then);
  platform_.issue(hart_, std::move(op));
}

void HartContext::trap_return() {
  Platform::Op op;
  op.kind = Platform::OpKind::Return;
  platform_.issue(hart_, std::move(op));
}

void HartContext::set_return(OpResult result) { platform_.top(hart_).ret = result; }

const TrapRecord& HartContext::trap() const {
  const auto& frame = platform_.top(hart_);
  if (!frame.trap) throw SimulationError(fmt::format("hart {} is not handling a trap", hart_));
  return *frame.trap;
}

const MmioRequest& HartContext::fault() const {
  const auto& frame = platform_.top(hart_);
  if (!frame.awaiting || frame.awaiting->kind != Platform::OpKind::Mmio)
    throw SimulationError(fmt::format("hart {} is not handling an MMIO fault", hart_));
  return frame.awaiting->mmio;
}

const SbiCall& HartContext::sbi_call() const {
  const auto& frame = platform_.top(hart_);
  if (!frame.awaiting || frame.awaiting->kind != Platform::OpKind::Ecall)
    throw SimulationError(fmt::format("hart {} is not handling an ecall", hart_));
  return frame.awaiting->call;
}

void HartContext::set_interrupts_enabled(bool enabled) {
  Hart& h = platform_.machine().hart(hart_);
  if (h.supervisor_ie == enabled) return;
  h.supervisor_ie = enabled;
  platform_.kick(hart_);
}

void HartContext::trace(TraceKind kind, std::string detail) {
  platform_.trace().record(platform_.now(), hart_, kind, std::move(detail));
}

// ---------------------------------------------------------------------------
// Platform

Platform::Platform(Machine machine, CostModel costs, std::uint64_t seed, bool trace_enabled)
    : machine_(std::move(machine)), costs_(costs), rng_(seed), trace_(trace_enabled) {
  costs_.validate();
  exec_.resize(machine_.size());
  for (HartId h = 0; h < machine_.size(); ++h) {
    Frame base;
    exec_[h].stack.push_back(std::move(base));
  }
  targets_.resize(5);
  machine_.set_change_listener([this](HartId h) { kick(h); });
}

void Platform::set_handler(PrivilegeMode mode, TrapHandler* handler) {
  if (mode == PrivilegeMode::M)
    firmware_ = handler;
  else if (mode == PrivilegeMode::HS)
    hypervisor_ = handler;
  else
    throw std::invalid_argument(fmt::format("no global handler slot for {}", to_string(mode)));
}

void Platform::set_guest(HartId hart, GuestProgram* program) {
  exec_.at(hart).guest = program;
  exec_.at(hart).stack.front().handler = program;
}

void Platform::set_translation(HartId hart, Translation translation) {
  if (translation.stages != 1 && translation.stages != 2)
    throw std::invalid_argument(fmt::format("translation stages must be 1 or 2, got {}", translation.stages));
  exec_.at(hart).translation = translation;
}

void Platform::set_contention(double level) {
  if (!(level >= 0.0 && level <= 1.0))
    throw std::invalid_argument(fmt::format("contention level {} outside [0,1]", level));
  contention_ = level;
}

void Platform::on_event(Target target, std::function<void(const Event&)> handler) {
  if (target == Target::Hart) throw std::invalid_argument("hart events are handled by the platform");
  targets_[static_cast<std::size_t>(target)] = std::move(handler);
}

void Platform::add_clocked(std::function<void(SimTime)> sync) { clocked_.push_back(std::move(sync)); }

Platform::Frame& Platform::top(HartId hart) { return exec_.at(hart).stack.back(); }
const Platform::Frame& Platform::top(HartId hart) const { return exec_.at(hart).stack.back(); }

void Platform::boot() {
  for (HartId h = 0; h < exec_.size(); ++h) {
    if (exec_[h].guest == nullptr) continue;
    running_ = h;
    HartContext ctx(*this, h);
    exec_[h].guest->boot(ctx);
    running_.reset();
    splice(h);
    kick(h);
  }
}

void Platform::issue(HartId hart, Op op) {
  if (running_ && *running_ == hart) {
    staging_.push_back(std::move(op));
    return;
  }
  top(hart).ops.push_back(std::move(op));
  kick(hart);
}

void Platform::splice(HartId hart) {
  auto& ops = top(hart).ops;
  ops.insert(ops.begin(), std::make_move_iterator(staging_.begin()), std::make_move_iterator(staging_.end()));
  staging_.clear();
}

void Platform::kick(HartId hart) {
  auto& ex = exec_.at(hart);
  if (ex.kick_pending) return;
  ex.kick_pending = true;
  queue_.schedule(now(), Action{Target::Hart, kKick, hart, 0});
}

Cycles Platform::trap_entry_cost(HartId hart) {
  const PrivilegeMode mode = machine_.hart(hart).mode;
  const Translation t = mode == PrivilegeMode::VS ? exec_[hart].translation : Translation{};
  Cycles cost = costs_.trap_cost;
  for (unsigned i = 0; i < costs_.context_save_accesses; ++i)
    cost += mem_access_cost(costs_.memory, costs_.contention, t.stages, t.hugepage_gstage, contention_, rng_);
  return cost;
}

TrapHandler* Platform::handler_for(HartId hart, PrivilegeMode mode) {
  TrapHandler* h = nullptr;
  switch (mode) {
    case PrivilegeMode::M: h = firmware_; break;
    case PrivilegeMode::HS: h = hypervisor_; break;
    default: h = exec_[hart].guest; break;
  }
  if (h == nullptr)
    throw SimulationError(fmt::format("no trap handler for {} on hart {}", to_string(mode), hart));
  return h;
}

void Platform::enter_trap(HartId hart, TrapRecord record, std::optional<Op> awaiting) {
  Frame frame;
  frame.handler = handler_for(hart, record.to_mode);
  frame.awaiting = std::move(awaiting);
  if (trace_.enabled()) trace_.record(now(), hart, TraceKind::TrapEntry, trap_detail(record));
  Op entry;
  entry.kind = OpKind::TrapEntry;
  entry.cycles = (record.is_interrupt() ? costs_.irq_latency : 0) + trap_entry_cost(hart);
  frame.trap = std::move(record);
  exec_[hart].stack.push_back(std::move(frame));
  begin(hart, std::move(entry));
}

void Platform::do_return(HartId hart) {
  auto& stack = exec_[hart].stack;
  if (stack.size() < 2) throw SimulationError(fmt::format("trap return without trap on hart {}", hart));
  Frame frame = std::move(stack.back());
  stack.pop_back();
  machine_.trap_return(hart, *frame.trap, now());
  if (trace_.enabled()) trace_.record(now(), hart, TraceKind::TrapExit, trap_detail(*frame.trap));
  if (!frame.ops.empty())
    throw SimulationError(fmt::format("hart {}: {} operations queued after trap return", hart, frame.ops.size()));
  if (frame.awaiting && frame.awaiting->then) {
    running_ = hart;
    HartContext ctx(*this, hart);
    frame.awaiting->then(ctx, frame.ret);
    running_.reset();
    splice(hart);
  }
}

void Platform::begin(HartId hart, Op op) {
  auto& ex = exec_[hart];
  const PrivilegeMode mode = machine_.hart(hart).mode;
  switch (op.kind) {
    case OpKind::Local:
    case OpKind::TrapEntry:
      break;
    case OpKind::Memory: {
      const Translation t = mode == PrivilegeMode::VS ? ex.translation : Translation{};
      op.cycles = 0;
      for (unsigned i = 0; i < op.accesses; ++i)
        op.cycles += mem_access_cost(costs_.memory, costs_.contention, t.stages, t.hugepage_gstage, contention_, rng_);
      break;
    }
    case OpKind::Mmio: {
      if (bus_ == nullptr) throw SimulationError("no MMIO bus attached");
      switch (bus_->classify(hart, mode, op.mmio.addr)) {
        case AccessClass::Direct:
          op.cycles = costs_.mmio_base_cost + sample_contention(contention_, rng_, costs_.contention);
          break;
        case AccessClass::GuestFault:
          enter_trap(hart, machine_.raise_exception(hart, Exception::GuestMmioFault, now()), std::move(op));
          return;
        case AccessClass::Unmapped:
          op.cycles = costs_.mmio_base_cost;
          op.unmapped = true;
          op.result = OpResult::denied();
          break;
      }
      break;
    }
    case OpKind::Ecall: {
      if (trace_.enabled())
        trace_.record(now(), hart, TraceKind::SbiCall,
                      fmt::format("{} from {}", to_string(op.call.function), to_string(mode)));
      const Exception e = mode == PrivilegeMode::VS ? Exception::EcallFromVS : Exception::EcallFromS;
      enter_trap(hart, machine_.raise_exception(hart, e, now()), std::move(op));
      return;
    }
    case OpKind::Poll:
      op.cycles = costs_.poll_granularity;
      break;
    case OpKind::Return:
      do_return(hart);
      return;
  }
  ex.in_flight = std::move(op);
  queue_.schedule(now() + ex.in_flight->cycles, Action{Target::Hart, kComplete, hart, 0});
}

void Platform::complete(HartId hart) {
  auto& ex = exec_[hart];
  if (!ex.in_flight) throw SimulationError(fmt::format("completion without operation on hart {}", hart));
  Op op = std::move(*ex.in_flight);
  ex.in_flight.reset();
  machine_.hart(hart).busy_cycles += op.cycles;

  if (op.kind == OpKind::TrapEntry) {
    Frame& frame = top(hart);
    running_ = hart;
    HartContext ctx(*this, hart);
    frame.handler->on_trap(ctx, *frame.trap);
    running_.reset();
    splice(hart);
    return;
  }
  if (op.kind == OpKind::Mmio && !op.unmapped) {
    op.result = bus_->access(hart, op.mmio);
    if (trace_.enabled())
      trace_.record(now(), hart, TraceKind::Mmio,
                    fmt::format("{} {:#x}={:#x}", op.mmio.is_write() ? "write" : "read", op.mmio.addr,
                                op.mmio.is_write() ? op.mmio.value : op.result.value));
  }
  if (op.then) {
    running_ = hart;
    HartContext ctx(*this, hart);
    op.then(ctx, op.result);
    running_.reset();
    splice(hart);
  }
}

void Platform::step(HartId hart) {
  auto& ex = exec_[hart];
  while (!ex.in_flight) {
    if (machine_.next_eligible(hart)) {
      enter_trap(hart, machine_.take_trap(hart, now()), std::nullopt);
      continue;
    }
    Frame& frame = top(hart);
    if (frame.ops.empty()) return;
    Op& next = frame.ops.front();
    if (next.kind == OpKind::Poll && !next.predicate()) return;
    Op op = std::move(next);
    frame.ops.pop_front();
    begin(hart, std::move(op));
  }
}

void Platform::dispatch(const Event& event) {
  for (auto& sync : clocked_) sync(event.due);
  if (event.action.target == Target::Hart) {
    const HartId h = event.action.hart;
    if (event.action.code == kKick)
      exec_.at(h).kick_pending = false;
    else
      complete(h);
    step(h);
    return;
  }
  auto& handler = targets_[static_cast<std::size_t>(event.action.target)];
  if (handler) handler(event);
}

bool Platform::run_until(const std::function<bool()>& done) {
  if (done()) return true;
  while (auto event = queue_.advance()) {
    dispatch(*event);
    if (done()) return true;
  }
  return false;
}

bool Platform::quiescent() const {
  for (const auto& ex : exec_) {
    // a queued kick may still deliver a pending interrupt
    if (ex.in_flight || ex.kick_pending || ex.stack.size() > 1 || !ex.stack.front().ops.empty()) return false;
  }
  return true;
}

}  // namespace partsim
