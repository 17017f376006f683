// SPDX-License-Identifier: Apache-2.0
#include "partsim/guests/scripted.hpp"

#include <stdexcept>

#include <fmt/core.h>

namespace partsim {

void ScriptedGuest::boot(HartContext& ctx) {
  for (const ScriptedAction& a : actions_) {
    auto record = [this](HartContext&, OpResult r) { outcomes_.push_back(r); };
    switch (a.kind) {
      case ScriptedAction::Kind::Sbi: ctx.ecall(a.call, record); break;
      case ScriptedAction::Kind::MmioRead: ctx.mmio_read(a.addr, record); break;
      case ScriptedAction::Kind::MmioWrite: ctx.mmio_write(a.addr, a.value, record); break;
    }
  }
}

void ScriptedGuest::on_trap(HartContext& ctx, const TrapRecord& record) {
  throw SimulationError(fmt::format("scripted guest on hart {} got unexpected {}", ctx.hart(), to_string(record.cause)));
}

namespace {

template <typename T>
const T& pick(const std::vector<T>& v, RngState& rng) {
  return v[rng.uniform_int(0, v.size() - 1)];
}

}  // namespace

std::vector<ScriptedAction> adversarial_actions(const DeviceBus& bus, HartId self, HartMask own_harts,
                                                const ForeignResources& foreign, std::size_t count, RngState& rng) {
  const std::vector<HartId> fharts = foreign.harts.to_vector();
  const std::vector<SourceId> fsources(foreign.sources.begin(), foreign.sources.end());
  const std::vector<HartId> oharts = own_harts.to_vector();
  if (fharts.empty() || fsources.empty() || oharts.empty())
    throw std::invalid_argument("adversary needs own harts, foreign harts and foreign sources");

  const Plic& plic = bus.plic();
  const Aplic& aplic = bus.aplic();
  const Imsic& imsic = bus.imsic();
  const IrqLevel levels[] = {IrqLevel::S, IrqLevel::VS, IrqLevel::M};

  std::vector<ScriptedAction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ScriptedAction a;
    const HartId fh = pick(fharts, rng);
    const SourceId fs = pick(fsources, rng);
    const HartId any = rng.bernoulli(0.5) ? fh : pick(oharts, rng);
    const Word value = rng.uniform_int(0, 0xFFFFFFFF);
    switch (rng.uniform_int(0, 15)) {
      case 0: {
        HartMask m = HartMask::single(fh);
        if (rng.bernoulli(0.5)) m.insert(pick(oharts, rng));
        a.call = SbiCall::send_ipi(self, m);
        a.label = fmt::format("send_ipi to {:#x}", m.bits());
        break;
      }
      case 1: {
        HartMask m = HartMask::single(fh);
        if (rng.bernoulli(0.5)) m.insert(self);
        a.call = SbiCall::rfence(self, m);
        a.label = fmt::format("rfence on {:#x}", m.bits());
        break;
      }
      case 2:
        a.call = rng.bernoulli(0.5) ? SbiCall::hart_stop(self, any) : SbiCall::hart_start(self, any);
        a.label = fmt::format("{} hart {}", to_string(a.call.function), any);
        break;
      case 3:
        a.kind = ScriptedAction::Kind::MmioWrite;
        a.addr = bus.plic_addr(plic.priority_offset(fs));
        a.value = value & 7;
        a.label = fmt::format("plic priority of source {}", fs);
        break;
      case 4:
        a.kind = ScriptedAction::Kind::MmioWrite;
        a.addr = bus.plic_addr(plic.enable_offset(rng.bernoulli(0.5) ? Plic::s_context(fh) : Plic::m_context(any), fs / 32));
        a.value = value | (Word{1} << (fs % 32));
        a.label = fmt::format("plic enable word of source {}", fs);
        break;
      case 5:
        a.kind = ScriptedAction::Kind::MmioWrite;
        a.addr = bus.plic_addr(plic.enable_offset(Plic::s_context(self), fs / 32));
        a.value = Word{1} << (fs % 32);
        a.label = fmt::format("plic own enable with foreign source {}", fs);
        break;
      case 6:
        a.kind = ScriptedAction::Kind::MmioWrite;
        a.addr = bus.plic_addr(plic.threshold_offset(rng.bernoulli(0.5) ? Plic::s_context(fh) : Plic::m_context(any)));
        a.value = value & 7;
        a.label = fmt::format("plic threshold of hart {}", fh);
        break;
      case 7:
        a.kind = ScriptedAction::Kind::MmioRead;
        a.addr = bus.plic_addr(plic.claim_offset(Plic::s_context(fh)));
        a.label = fmt::format("plic claim on hart {}", fh);
        break;
      case 8:
        a.kind = ScriptedAction::Kind::MmioWrite;
        a.addr = bus.plic_addr(plic.claim_offset(rng.bernoulli(0.5) ? Plic::s_context(self) : Plic::s_context(fh)));
        a.value = fs;
        a.label = fmt::format("plic complete of source {}", fs);
        break;
      case 9: {
        const IrqLevel level = levels[rng.uniform_int(0, 2)];
        a.kind = ScriptedAction::Kind::MmioWrite;
        a.addr = bus.imsic_addr(imsic.file_offset(fh, level) + Imsic::kSetEipNum);
        a.value = rng.uniform_int(1, imsic.identities() - 1);
        a.label = fmt::format("imsic {} file of hart {}", to_string(level), fh);
        break;
      }
      case 10: {
        const IrqLevel level = rng.bernoulli(0.5) ? IrqLevel::S : IrqLevel::M;
        a.kind = ScriptedAction::Kind::MmioWrite;
        a.addr = bus.imsic_addr(imsic.file_offset(self, level) + Imsic::kSetEipNum);
        a.value = rng.uniform_int(1, imsic.identities() - 1);
        a.label = fmt::format("imsic own {} file", to_string(level));
        break;
      }
      case 11:
        a.kind = ScriptedAction::Kind::MmioWrite;
        a.addr = bus.clint_addr(rng.bernoulli(0.5) ? Clint::kMsip + 4 * Addr{any} : Clint::kMtimecmp + 8 * Addr{any});
        a.value = value;
        a.label = fmt::format("clint register of hart {}", any);
        break;
      case 12:
        a.kind = ScriptedAction::Kind::MmioWrite;
        a.addr = bus.sswi_addr(Sswi::kSetssip + 4 * Addr{any});
        a.value = 1;
        a.label = fmt::format("sswi doorbell of hart {}", any);
        break;
      case 13:
        a.kind = ScriptedAction::Kind::MmioWrite;
        a.addr = bus.aplic_addr(Aplic::kTarget + 4 * Addr{fs - 1u});
        a.value = (Word{self} << 18) | 1;
        a.label = fmt::format("aplic target of source {}", fs);
        break;
      case 14:
        a.kind = ScriptedAction::Kind::MmioWrite;
        a.addr = bus.aplic_addr(rng.bernoulli(0.5) ? Aplic::kSetienum : Aplic::kSetipnum);
        a.value = fs;
        a.label = fmt::format("aplic enable/pend of source {}", fs);
        break;
      default:
        a.kind = rng.bernoulli(0.5) ? ScriptedAction::Kind::MmioRead : ScriptedAction::Kind::MmioWrite;
        a.addr = bus.aplic_addr(aplic.claimi_offset(fh));
        a.value = fs;
        a.label = fmt::format("aplic claimi of hart {}", fh);
        break;
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace partsim
