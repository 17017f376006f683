// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "partsim/devices/bus.hpp"
#include "partsim/devices/irqchip.hpp"
#include "partsim/guests/benchmark.hpp"
#include "partsim/guests/mailbox.hpp"
#include "partsim/machine/platform.hpp"

namespace partsim {

/// What a guest script can see of the platform.
struct GuestEnv {
  Platform* platform = nullptr;
  DeviceBus* bus = nullptr;
  IrqChip irqchip = IrqChip::PlicClint;
  Mailbox* mailbox = nullptr;

  /// VS when running under the hypervisor, S on bare metal.
  IrqLevel level() const { return platform->machine().virtualized() ? IrqLevel::VS : IrqLevel::S; }
};

/// Asserts a wired source on whichever controller delivers wired interrupts.
void raise_source(DeviceBus& bus, IrqChip chip, SourceId source);

/// Programs the timer one period ahead through SBI and measures how late
/// the guest-level timer interrupt arrives.
class TimerJitterGuest : public GuestProgram {
 public:
  TimerJitterGuest(GuestEnv env, std::uint64_t iterations, Cycles period);

  void boot(HartContext& ctx) override;
  void on_trap(HartContext& ctx, const TrapRecord& record) override;

  const SampleLog& log() const { return log_; }
  SampleLog& log() { return log_; }
  bool done() const { return log_.done() && disarmed_; }

 private:
  void arm(HartContext& ctx);

  GuestEnv env_;
  Cycles period_;
  SampleLog log_;
  SimTime deadline_;
  TrapSnapshot start_;
  bool disarmed_ = false;
};

/// Moves one IPI number from the running hart to `to`, and waits for one.
/// Doorbell mechanisms (firmware IPI, SSWI) carry the number through the
/// mailbox; MSIs carry it as the identity.
class IpiTransport {
 public:
  static constexpr Identity kIpiIdentity = 1;

  explicit IpiTransport(GuestEnv env) : env_(env) {}

  bool uses_msi() const { return env_.irqchip == IrqChip::AiaMsi; }
  void send(HartContext& ctx, HartId to, std::uint64_t number);
  /// Waits for an IPI from `from` and passes its number to `then`.
  void receive(HartContext& ctx, HartId from, std::function<void(HartContext&, std::uint64_t)> then);
  /// Guest-side enables needed before the first IPI.
  void prepare(HartContext& ctx);

 private:
  GuestEnv env_;
};

/// Round-trip initiator: sends, waits for the echo, records the RTT.
class IpiSenderGuest : public GuestProgram {
 public:
  IpiSenderGuest(GuestEnv env, HartId peer, std::uint64_t iterations);

  void boot(HartContext& ctx) override;
  void on_trap(HartContext& ctx, const TrapRecord& record) override;

  const SampleLog& log() const { return log_; }
  SampleLog& log() { return log_; }
  bool done() const { return log_.done(); }
  std::uint64_t mismatches() const { return mismatches_; }

 private:
  void iterate(HartContext& ctx);

  GuestEnv env_;
  IpiTransport transport_;
  HartId peer_;
  SampleLog log_;
  SimTime t0_;
  TrapSnapshot start_;
  std::uint64_t mismatches_ = 0;
};

/// The target's only task: send every IPI back.
class IpiEchoGuest : public GuestProgram {
 public:
  IpiEchoGuest(GuestEnv env, HartId peer, std::uint64_t echoes);

  void boot(HartContext& ctx) override;
  void on_trap(HartContext& ctx, const TrapRecord& record) override;

  std::uint64_t echoed() const { return echoed_; }

 private:
  void serve(HartContext& ctx);

  GuestEnv env_;
  IpiTransport transport_;
  HartId peer_;
  std::uint64_t echoes_;
  std::uint64_t echoed_ = 0;
};

/// Handles a wired source: injection up to the guest handler, then claim
/// and complete through the controller's guest-visible interface.
class PlicPathGuest : public GuestProgram {
 public:
  PlicPathGuest(GuestEnv env, HartId hart, SourceId source, std::uint64_t iterations, Cycles period);

  void boot(HartContext& ctx) override;
  void on_trap(HartContext& ctx, const TrapRecord& record) override;
  /// Device side: the source fires now.
  void fire();

  const SampleLog& log() const { return log_; }
  SampleLog& log() { return log_; }
  bool done() const { return log_.done(); }
  SourceId source() const { return source_; }

 private:
  void schedule_next(SimTime now);
  void finish(HartContext& ctx, Cycles claim, Cycles complete);

  GuestEnv env_;
  HartId hart_;
  SourceId source_;
  Cycles period_;
  SampleLog log_;
  SimTime asserted_;
  TrapSnapshot start_;
  Cycles injection_ = 0;
};

/// Remote fence SBI call timed with the cycle counter.
class SyncTrapGuest : public GuestProgram {
 public:
  SyncTrapGuest(GuestEnv env, std::uint64_t iterations);

  void boot(HartContext& ctx) override;
  void on_trap(HartContext& ctx, const TrapRecord& record) override;

  const SampleLog& log() const { return log_; }
  SampleLog& log() { return log_; }
  bool done() const { return log_.done(); }

 private:
  void iterate(HartContext& ctx);

  GuestEnv env_;
  SampleLog log_;
};

}  // namespace partsim
