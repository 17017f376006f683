// SPDX-License-Identifier: Apache-2.0
#include "partsim/scenarios/system.hpp"

#include <fmt/core.h>

namespace partsim {

System::System(RunSpec spec, bool with_benchmark) : spec_(std::move(spec)) {
  spec_.validate();
  const bool virtualized = has_hypervisor(spec_.scenario);

  Machine machine(spec_.machine.harts, virtualized);
  try {
    for (const auto& [irq_name, mode_name] : spec_.machine.delegation) {
      for (Interrupt irq : irq::kPriorityOrder) {
        if (to_string(irq) != irq_name) continue;
        for (HartId h = 0; h < machine.size(); ++h) machine.hart(h).delegation.set_route(irq, *parse_privilege(mode_name));
      }
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("machine.delegation: {}", e.what()));
  }

  platform_ = std::make_unique<Platform>(std::move(machine), spec_.machine.costs, spec_.seed, spec_.trace);
  Platform* p = platform_.get();
  bus_ = std::make_unique<DeviceBus>(spec_.machine.devices, p->machine(),
                                     [p](SimTime due) { p->queue().schedule(due, Action{Target::Clint, 0, 0, 0}); });
  DeviceBus* bus = bus_.get();
  p->set_bus(bus);
  p->add_clocked([bus](SimTime now) { bus->clint().sync(now); });
  // Timer lines are re-evaluated by the clocked sync before dispatch.
  p->on_event(Target::Clint, [](const Event&) {});

  firmware_ = std::make_unique<Firmware>(*p, *bus);
  p->set_handler(PrivilegeMode::M, firmware_.get());
  firmware_->boot();

  partition();
  if (with_benchmark) install_benchmark();
}

void System::partition() {
  const BenchmarkParams& bp = spec_.params;
  if (!has_hypervisor(spec_.scenario)) {
    // Bare metal: the benchmark owns the machine; the source goes straight
    // to the supervisor context of the benchmark hart.
    route_wired_source(*bus_, spec_.irqchip, bp.source, bp.hart, IrqLevel::S);
    bus_->recompute_ownership();
    return;
  }

  HypervisorConfig hc;
  hc.irqchip = spec_.irqchip;
  hc.hv_ipi_shortcut = spec_.hv_ipi_shortcut;
  hc.memory = spec_.machine.memory;
  hypervisor_ = std::make_unique<Hypervisor>(*platform_, *bus_, hc);
  platform_->set_handler(PrivilegeMode::HS, hypervisor_.get());

  bench_cell_ = hypervisor_->create_cell(spec_.cell.to_config());
  const Cell& cell = hypervisor_->cell(bench_cell_);
  if (spec_.benchmark == BenchmarkKind::IpiRtt && !cell.harts.contains(bp.peer))
    throw CellError(fmt::format("peer hart {} is outside cell '{}'", bp.peer, cell.name));
  if (spec_.benchmark == BenchmarkKind::PlicPath && !cell.owns_source(bp.source))
    throw CellError(fmt::format("source {} is not owned by cell '{}'", bp.source, cell.name));
  for (SourceId s : cell.irq_sources) hypervisor_->route_source(s, bp.hart);
  hypervisor_->start_cell(bench_cell_);
  hypervisor_->enter_operational();

  if (spec_.scenario == Scenario::C) {
    HartMask load_harts;
    for (HartId h : spec_.load.harts) {
      if (!hypervisor_->root().harts.contains(h)) throw ConfigError(fmt::format("load hart {} is not a root-cell hart", h));
      load_harts.insert(h);
    }
    load_ = std::make_unique<LoadGenerator>(*platform_, load_harts, spec_.load.config, spec_.seed);
    LoadGenerator* load = load_.get();
    platform_->on_event(Target::Load, [load](const Event& e) { load->on_event(e); });
  }
}

void System::install_benchmark() {
  const BenchmarkParams& bp = spec_.params;
  const GuestEnv e = env();
  switch (spec_.benchmark) {
    case BenchmarkKind::TimerJitter:
      timer_ = std::make_unique<TimerJitterGuest>(e, bp.iterations, bp.period);
      platform_->set_guest(bp.hart, timer_.get());
      break;
    case BenchmarkKind::IpiRtt:
      ipi_sender_ = std::make_unique<IpiSenderGuest>(e, bp.peer, bp.iterations);
      ipi_echo_ = std::make_unique<IpiEchoGuest>(e, bp.hart, bp.iterations);
      platform_->set_guest(bp.hart, ipi_sender_.get());
      platform_->set_guest(bp.peer, ipi_echo_.get());
      break;
    case BenchmarkKind::PlicPath: {
      plic_ = std::make_unique<PlicPathGuest>(e, bp.hart, bp.source, bp.iterations, bp.irq_period);
      platform_->set_guest(bp.hart, plic_.get());
      PlicPathGuest* g = plic_.get();
      platform_->on_event(Target::Source, [g](const Event&) { g->fire(); });
      break;
    }
    case BenchmarkKind::SyncTrap:
      sync_ = std::make_unique<SyncTrapGuest>(e, bp.iterations);
      platform_->set_guest(bp.hart, sync_.get());
      break;
  }
}

bool System::benchmark_done() const {
  switch (spec_.benchmark) {
    case BenchmarkKind::TimerJitter: return timer_ && timer_->done();
    case BenchmarkKind::IpiRtt: return ipi_sender_ && ipi_sender_->done();
    case BenchmarkKind::PlicPath: return plic_ && plic_->done();
    case BenchmarkKind::SyncTrap: return sync_ && sync_->done();
  }
  return false;
}

void System::run(const std::function<bool()>& done) {
  if (booted_) throw SimulationError("system already ran");
  booted_ = true;
  platform_->boot();
  if (load_) load_->start();
  Platform* p = platform_.get();
  if (!p->run_until([&] { return done() && p->quiescent(); }))
    throw SimulationError(fmt::format("simulation stalled at cycle {} before completion", p->now().cycles));
}

void System::run_benchmark() {
  run([this] { return benchmark_done(); });
}

std::vector<BenchmarkSample> System::take_samples() {
  switch (spec_.benchmark) {
    case BenchmarkKind::TimerJitter: return timer_->log().take();
    case BenchmarkKind::IpiRtt: return ipi_sender_->log().take();
    case BenchmarkKind::PlicPath: return plic_->log().take();
    case BenchmarkKind::SyncTrap: return sync_->log().take();
  }
  return {};
}

}  // namespace partsim
