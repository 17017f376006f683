// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <vector>

#include "partsim/devices/bus.hpp"
#include "partsim/firmware/firmware.hpp"
#include "partsim/guests/load.hpp"
#include "partsim/guests/mailbox.hpp"
#include "partsim/guests/programs.hpp"
#include "partsim/hypervisor/hypervisor.hpp"
#include "partsim/machine/platform.hpp"
#include "partsim/scenarios/config.hpp"

namespace partsim {

/// One assembled simulation instance: machine, devices, firmware and, in
/// scenarios B and C, the hypervisor with the benchmark cell carved out and
/// the operational phase entered. Self-contained, so whole instances can be
/// run on different threads.
class System {
 public:
  /// Validates the spec and partitions the machine. Throws ConfigError (or
  /// CellError for partitioning conflicts) before any simulated time passes.
  /// Without `with_benchmark` the benchmark harts are left for the caller's
  /// own guest programs.
  explicit System(RunSpec spec, bool with_benchmark = true);
  System(const System&) = delete;
  System& operator=(const System&) = delete;

  const RunSpec& spec() const { return spec_; }
  Platform& platform() { return *platform_; }
  const Platform& platform() const { return *platform_; }
  Machine& machine() { return platform_->machine(); }
  DeviceBus& bus() { return *bus_; }
  const DeviceBus& bus() const { return *bus_; }
  Firmware& firmware() { return *firmware_; }
  const Firmware& firmware() const { return *firmware_; }
  /// Null in scenario A.
  Hypervisor* hypervisor() { return hypervisor_.get(); }
  const Hypervisor* hypervisor() const { return hypervisor_.get(); }
  const LoadGenerator* load() const { return load_.get(); }
  const Mailbox& mailbox() const { return mailbox_; }
  CellId bench_cell() const { return bench_cell_; }
  GuestEnv env() { return GuestEnv{platform_.get(), bus_.get(), spec_.irqchip, &mailbox_}; }

  /// Boots guests, starts the load and runs until the benchmark is done and
  /// every hart is idle. Throws SimulationError if the event queue drains
  /// first.
  void run_benchmark();
  /// Boots guests and runs until `done` holds and every hart is idle.
  void run(const std::function<bool()>& done);

  bool benchmark_done() const;
  std::vector<BenchmarkSample> take_samples();
  std::uint64_t ipi_mismatches() const { return ipi_sender_ ? ipi_sender_->mismatches() : 0; }

 private:
  void partition();
  void install_benchmark();

  RunSpec spec_;
  std::unique_ptr<Platform> platform_;
  std::unique_ptr<DeviceBus> bus_;
  std::unique_ptr<Firmware> firmware_;
  std::unique_ptr<Hypervisor> hypervisor_;
  std::unique_ptr<LoadGenerator> load_;
  Mailbox mailbox_;
  CellId bench_cell_ = Hypervisor::kRootCell;

  std::unique_ptr<TimerJitterGuest> timer_;
  std::unique_ptr<IpiSenderGuest> ipi_sender_;
  std::unique_ptr<IpiEchoGuest> ipi_echo_;
  std::unique_ptr<PlicPathGuest> plic_;
  std::unique_ptr<SyncTrapGuest> sync_;
  bool booted_ = false;
};

}  // namespace partsim
