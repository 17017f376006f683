// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "partsim/firmware/sbi_types.hpp"
#include "partsim/machine/cost_model.hpp"
#include "partsim/machine/machine.hpp"
#include "partsim/machine/mmio.hpp"
#include "partsim/sim/event_queue.hpp"
#include "partsim/sim/rng.hpp"
#include "partsim/sim/trace.hpp"

namespace partsim {

class HartContext;
class Platform;

using Continuation = std::function<void(HartContext&, OpResult)>;

/// Code run when a trap lands in a mode: firmware (M), hypervisor (HS) or a
/// guest (VS / S-bare). It issues operations through the context and ends
/// with trap_return().
class TrapHandler {
 public:
  virtual ~TrapHandler() = default;
  virtual void on_trap(HartContext& ctx, const TrapRecord& record) = 0;
};

/// A guest-level script. boot() runs once in the base frame.
class GuestProgram : public TrapHandler {
 public:
  virtual void boot(HartContext& ctx) = 0;
};

/// Handle to one hart for the code currently running on it. Operations are
/// queued and executed in issue order; each takes simulated time and then
/// invokes its continuation with the result.
class HartContext {
 public:
  HartContext(Platform& platform, HartId hart) : platform_(platform), hart_(hart) {}

  SimTime now() const;
  HartId hart() const { return hart_; }
  PrivilegeMode mode() const;
  Platform& platform() { return platform_; }
  Machine& machine();
  const CostModel& costs() const;

  /// Fixed-cost local work.
  void local(Cycles cycles, Continuation then = {});
  /// `accesses` memory accesses at the hart's translation regime.
  void memory(unsigned accesses, Continuation then = {});
  void mmio_read(Addr addr, Continuation then = {});
  void mmio_write(Addr addr, Word value, Continuation then = {});
  /// Environment call to the next more privileged mode.
  void ecall(const SbiCall& call, Continuation then = {});
  /// Waits until `predicate` holds, then charges the poll granularity.
  void poll(std::function<bool()> predicate, Continuation then = {});
  /// Queues the return from the current trap.
  void trap_return();

  /// Result delivered to the operation that caused the current trap.
  void set_return(OpResult result);
  /// Trap being handled by the current frame; throws if in the base frame.
  const TrapRecord& trap() const;
  /// The faulting access (GuestMmioFault traps only).
  const MmioRequest& fault() const;
  /// The SBI call (ecall traps only).
  const SbiCall& sbi_call() const;

  void set_interrupts_enabled(bool enabled);
  void trace(TraceKind kind, std::string detail);

 private:
  Platform& platform_;
  HartId hart_;
};

/// Translation regime for memory accesses made by a hart.
struct Translation {
  unsigned stages = 1;
  bool hugepage_gstage = false;
};

/// The executing system: machine state, time, costs, and the per-hart
/// operation executor. Devices and handlers are attached from outside.
class Platform {
 public:
  Platform(Machine machine, CostModel costs, std::uint64_t seed, bool trace_enabled = false);
  Platform(const Platform&) = delete;
  Platform& operator=(const Platform&) = delete;

  Machine& machine() { return machine_; }
  const Machine& machine() const { return machine_; }
  const CostModel& costs() const { return costs_; }
  EventQueue& queue() { return queue_; }
  SimTime now() const { return queue_.now(); }
  RngState& rng() { return rng_; }
  Trace& trace() { return trace_; }
  const Trace& trace() const { return trace_; }

  void set_bus(MmioBus* bus) { bus_ = bus; }
  void set_handler(PrivilegeMode mode, TrapHandler* handler);
  void set_guest(HartId hart, GuestProgram* program);
  void set_translation(HartId hart, Translation translation);
  const Translation& translation(HartId hart) const { return exec_.at(hart).translation; }

  /// Global contention level in [0, 1] applied to memory and MMIO accesses.
  void set_contention(double level);
  double contention() const { return contention_; }

  /// Handler for events addressed to a non-hart target.
  void on_event(Target target, std::function<void(const Event&)> handler);
  /// Device synchronised to the current time before each event dispatch.
  void add_clocked(std::function<void(SimTime)> sync);

  /// Runs boot() of every attached guest program at the current time.
  void boot();
  /// Processes events until `done` holds after an event or the queue drains.
  /// Returns false if the queue drained first.
  bool run_until(const std::function<bool()>& done);
  /// No hart has queued, running or trapped work.
  bool quiescent() const;

  /// Schedules a re-evaluation of `hart` at the current time (deduplicated).
  void kick(HartId hart);

  /// Cost charged to every trap entry (excluding interrupt recognition).
  Cycles trap_entry_cost(HartId hart);

 private:
  friend class HartContext;

  enum class OpKind : std::uint8_t { Local, Memory, Mmio, Ecall, Poll, Return, TrapEntry };

  struct Op {
    OpKind kind = OpKind::Local;
    Cycles cycles = 0;
    unsigned accesses = 0;
    MmioRequest mmio;
    SbiCall call;
    std::function<bool()> predicate;
    Continuation then;
    OpResult result;
    bool unmapped = false;
  };

  struct Frame {
    std::optional<TrapRecord> trap;
    TrapHandler* handler = nullptr;
    std::deque<Op> ops;
    std::optional<Op> awaiting;
    OpResult ret;
  };

  struct HartExec {
    std::vector<Frame> stack;
    std::optional<Op> in_flight;
    bool kick_pending = false;
    Translation translation;
    GuestProgram* guest = nullptr;
  };

  void issue(HartId hart, Op op);
  void splice(HartId hart);
  void step(HartId hart);
  void begin(HartId hart, Op op);
  void complete(HartId hart);
  void enter_trap(HartId hart, TrapRecord record, std::optional<Op> awaiting);
  void do_return(HartId hart);
  TrapHandler* handler_for(HartId hart, PrivilegeMode mode);
  Frame& top(HartId hart);
  const Frame& top(HartId hart) const;
  void dispatch(const Event& event);

  Machine machine_;
  CostModel costs_;
  EventQueue queue_;
  RngState rng_;
  Trace trace_;
  MmioBus* bus_ = nullptr;
  TrapHandler* firmware_ = nullptr;
  TrapHandler* hypervisor_ = nullptr;
  std::vector<HartExec> exec_;
  std::vector<Op> staging_;
  std::optional<HartId> running_;
  double contention_ = 0.0;
  std::vector<std::function<void(const Event&)>> targets_;
  std::vector<std::function<void(SimTime)>> clocked_;
};

}  // namespace partsim
