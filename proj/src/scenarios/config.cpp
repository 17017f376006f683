// SPDX-License-Identifier: Apache-2.0
#include "partsim/scenarios/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include <fmt/core.h>

namespace partsim {

using nlohmann::json;

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::A: return "A";
    case Scenario::B: return "B";
    case Scenario::C: return "C";
  }
  return "?";
}

std::optional<Scenario> parse_scenario(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "a" || t == "bare-metal" || t == "bare_metal") return Scenario::A;
  if (t == "b" || t == "partitioned") return Scenario::B;
  if (t == "c" || t == "loaded" || t == "partitioned+load") return Scenario::C;
  return std::nullopt;
}

CellConfig CellSpec::to_config() const {
  CellConfig c;
  c.name = name;
  for (HartId h : harts) c.harts.insert(h);
  c.memory = memory;
  c.irq_sources.insert(sources.begin(), sources.end());
  c.comm_page = comm_page;
  c.hugepage_gstage = hugepage_gstage;
  return c;
}

std::string RunSpec::label() const {
  return fmt::format("{}-{}-{}", to_string(benchmark), to_string(scenario), to_string(irqchip));
}

namespace {

bool contains(const std::vector<HartId>& v, HartId h) { return std::find(v.begin(), v.end(), h) != v.end(); }

}  // namespace

void RunSpec::validate() const {
  const unsigned n = machine.harts;
  if (n == 0 || n > kMaxHarts) throw ConfigError(fmt::format("machine.harts {} outside [1,{}]", n, kMaxHarts));
  try {
    machine.costs.validate();
    machine.devices.validate(n);
    load.config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [irq_name, mode_name] : machine.delegation) {
    bool known = false;
    for (Interrupt irq : irq::kPriorityOrder) known = known || to_string(irq) == irq_name;
    if (!known) throw ConfigError(fmt::format("machine.delegation: unknown interrupt '{}'", irq_name));
    if (!parse_privilege(mode_name))
      throw ConfigError(fmt::format("machine.delegation: unknown mode '{}'", mode_name));
  }
  if (params.iterations == 0) throw ConfigError("iterations must be positive");
  if (params.period == 0 || params.irq_period == 0) throw ConfigError("periods must be positive");
  if (params.hart >= n) throw ConfigError(fmt::format("benchmark hart {} does not exist", params.hart));
  if (benchmark == BenchmarkKind::IpiRtt) {
    if (params.peer >= n) throw ConfigError(fmt::format("peer hart {} does not exist", params.peer));
    if (params.peer == params.hart) throw ConfigError("peer hart must differ from the benchmark hart");
  }
  if (params.source == 0 || params.source >= machine.devices.sources)
    throw ConfigError(fmt::format("source {} outside [1,{})", params.source, machine.devices.sources));
  if (benchmark == BenchmarkKind::IpiRtt && irqchip == IrqChip::AiaMsi && machine.devices.identities < 2)
    throw ConfigError("MSI IPIs need at least one usable identity");
  if (irqchip == IrqChip::AiaMsi && params.source >= machine.devices.identities)
    throw ConfigError(fmt::format("source {} has no MSI identity (identities = {})", params.source,
                                  machine.devices.identities));
  if (!has_hypervisor(scenario)) return;

  for (HartId h : cell.harts)
    if (h >= n) throw ConfigError(fmt::format("cell hart {} does not exist", h));
  for (SourceId s : cell.sources)
    if (s == 0 || s >= machine.devices.sources) throw ConfigError(fmt::format("cell source {} does not exist", s));
  if (!contains(cell.harts, params.hart))
    throw ConfigError(fmt::format("benchmark hart {} is not in cell '{}'", params.hart, cell.name));
  if (scenario == Scenario::C) {
    if (load.harts.empty()) throw ConfigError("scenario C needs load harts");
    for (HartId h : load.harts) {
      if (h >= n) throw ConfigError(fmt::format("load hart {} does not exist", h));
      if (contains(cell.harts, h)) throw ConfigError(fmt::format("load hart {} is not in the root cell", h));
    }
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json addr_json(Addr a) { return fmt::format("{:#x}", a); }

Addr parse_addr(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<Addr>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<Addr>(j.get<std::int64_t>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    try {
      std::size_t used = 0;
      const Addr v = std::stoull(s, &used, 0);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(fmt::format("{}: expected an address", path));
}

json range_json(const MemRange& r) { return {{"base", addr_json(r.base)}, {"length", addr_json(r.length)}}; }

/// Walks one JSON object, tracking which keys were consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("{}: expected an object", where()));
  }
  ~Reader() = default;

  const json* find(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  template <typename T>
  void get(const char* key, T& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0))
          throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw ConfigError("");
      }
      out = v->get<T>();
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{}: wrong type", at(key)));
    }
  }

  void get_addr(const char* key, Addr& out) {
    if (const json* v = find(key)) out = parse_addr(*v, at(key));
  }

  template <typename T>
  void get_list(const char* key, std::vector<T>& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    if (!v->is_array()) throw ConfigError(fmt::format("{}: expected a list", at(key)));
    std::vector<T> tmp;
    for (const json& e : *v) {
      if (!e.is_number_unsigned()) throw ConfigError(fmt::format("{}: expected non-negative integers", at(key)));
      tmp.push_back(e.get<T>());
    }
    out = std::move(tmp);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(fmt::format("unknown key '{}'", at(it.key().c_str())));
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

MemRange read_range(const json& j, const std::string& path) {
  Reader r(j, path);
  MemRange m;
  r.get_addr("base", m.base);
  r.get_addr("length", m.length);
  r.finish();
  return m;
}

std::vector<MemRange> read_ranges(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(fmt::format("{}: expected a list", path));
  std::vector<MemRange> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_range(j[i], fmt::format("{}[{}]", path, i)));
  return out;
}

json costs_json(const CostModel& c) {
  return {
      {"trap_cost", c.trap_cost},
      {"irq_latency", c.irq_latency},
      {"mmio_base_cost", c.mmio_base_cost},
      {"sbi_cost", c.sbi_cost},
      {"firmware_irq_cost", c.firmware_irq_cost},
      {"hv_moderation_cost", c.hv_moderation_cost},
      {"hv_injection_cost", c.hv_injection_cost},
      {"hv_emulation_cost", c.hv_emulation_cost},
      {"csr_cost", c.csr_cost},
      {"poll_granularity", c.poll_granularity},
      {"mailbox_cost", c.mailbox_cost},
      {"context_save_accesses", c.context_save_accesses},
      {"memory",
       {{"base_cost", c.memory.base_cost},
        {"tlb_miss_prob_1stage", c.memory.tlb_miss_prob_1stage},
        {"tlb_miss_prob_2stage", c.memory.tlb_miss_prob_2stage},
        {"walk_cost_1stage", c.memory.walk_cost_1stage},
        {"walk_cost_2stage", c.memory.walk_cost_2stage},
        {"hugepage_factor", c.memory.hugepage_factor}}},
      {"contention",
       {{"p_hit", c.contention.p_hit},
        {"small_bound", c.contention.small_bound},
        {"min_tail", c.contention.min_tail},
        {"max_tail", c.contention.max_tail}}},
  };
}

void read_costs(const json& j, const std::string& path, CostModel& c) {
  Reader r(j, path);
  r.get("trap_cost", c.trap_cost);
  r.get("irq_latency", c.irq_latency);
  r.get("mmio_base_cost", c.mmio_base_cost);
  r.get("sbi_cost", c.sbi_cost);
  r.get("firmware_irq_cost", c.firmware_irq_cost);
  r.get("hv_moderation_cost", c.hv_moderation_cost);
  r.get("hv_injection_cost", c.hv_injection_cost);
  r.get("hv_emulation_cost", c.hv_emulation_cost);
  r.get("csr_cost", c.csr_cost);
  r.get("poll_granularity", c.poll_granularity);
  r.get("mailbox_cost", c.mailbox_cost);
  r.get("context_save_accesses", c.context_save_accesses);
  if (const json* m = r.find("memory")) {
    Reader mr(*m, r.at("memory"));
    mr.get("base_cost", c.memory.base_cost);
    mr.get("tlb_miss_prob_1stage", c.memory.tlb_miss_prob_1stage);
    mr.get("tlb_miss_prob_2stage", c.memory.tlb_miss_prob_2stage);
    mr.get("walk_cost_1stage", c.memory.walk_cost_1stage);
    mr.get("walk_cost_2stage", c.memory.walk_cost_2stage);
    mr.get("hugepage_factor", c.memory.hugepage_factor);
    mr.finish();
  }
  if (const json* m = r.find("contention")) {
    Reader cr(*m, r.at("contention"));
    cr.get("p_hit", c.contention.p_hit);
    cr.get("small_bound", c.contention.small_bound);
    cr.get("min_tail", c.contention.min_tail);
    cr.get("max_tail", c.contention.max_tail);
    cr.finish();
  }
  r.finish();
}

json devices_json(const DeviceLayout& d) {
  return {
      {"clint_base", addr_json(d.clint_base)},
      {"sswi_base", addr_json(d.sswi_base)},
      {"plic_base", addr_json(d.plic_base)},
      {"aplic_base", addr_json(d.aplic_base)},
      {"imsic_base", addr_json(d.imsic_base)},
      {"imsic_s_offset", addr_json(d.imsic_s_offset)},
      {"sources", d.sources},
      {"identities", d.identities},
      {"plic",
       {{"priority", addr_json(d.plic.priority)},
        {"pending", addr_json(d.plic.pending)},
        {"enable", addr_json(d.plic.enable)},
        {"enable_stride", addr_json(d.plic.enable_stride)},
        {"context", addr_json(d.plic.context)},
        {"context_stride", addr_json(d.plic.context_stride)},
        {"size", addr_json(d.plic.size)},
        {"claim_pages_shared", d.plic.claim_pages_shared}}},
  };
}

void read_devices(const json& j, const std::string& path, DeviceLayout& d) {
  Reader r(j, path);
  r.get_addr("clint_base", d.clint_base);
  r.get_addr("sswi_base", d.sswi_base);
  r.get_addr("plic_base", d.plic_base);
  r.get_addr("aplic_base", d.aplic_base);
  r.get_addr("imsic_base", d.imsic_base);
  r.get_addr("imsic_s_offset", d.imsic_s_offset);
  r.get("sources", d.sources);
  r.get("identities", d.identities);
  if (const json* p = r.find("plic")) {
    Reader pr(*p, r.at("plic"));
    pr.get_addr("priority", d.plic.priority);
    pr.get_addr("pending", d.plic.pending);
    pr.get_addr("enable", d.plic.enable);
    pr.get_addr("enable_stride", d.plic.enable_stride);
    pr.get_addr("context", d.plic.context);
    pr.get_addr("context_stride", d.plic.context_stride);
    pr.get_addr("size", d.plic.size);
    pr.get("claim_pages_shared", d.plic.claim_pages_shared);
    pr.finish();
  }
  r.finish();
}

template <typename E>
E parse_enum(const json& v, const std::string& path, std::optional<E> (*parse)(std::string_view)) {
  if (!v.is_string()) throw ConfigError(fmt::format("{}: expected a string", path));
  const auto e = parse(v.get<std::string>());
  if (!e) throw ConfigError(fmt::format("{}: unknown value '{}'", path, v.get<std::string>()));
  return *e;
}

}  // namespace

json spec_to_json(const RunSpec& s) {
  json memory = json::array();
  for (const MemRange& r : s.machine.memory.ranges()) memory.push_back(range_json(r));
  json cell_memory = json::array();
  for (const MemRange& r : s.cell.memory) cell_memory.push_back(range_json(r));
  json delegation = json::object();
  for (const auto& [k, v] : s.machine.delegation) delegation[k] = v;

  return {
      {"benchmark", std::string(to_string(s.benchmark))},
      {"scenario", std::string(to_string(s.scenario))},
      {"irqchip", std::string(to_string(s.irqchip))},
      {"seed", s.seed},
      {"iterations", s.params.iterations},
      {"params",
       {{"period", s.params.period},
        {"irq_period", s.params.irq_period},
        {"source", s.params.source},
        {"hart", s.params.hart},
        {"peer", s.params.peer}}},
      {"machine",
       {{"harts", s.machine.harts},
        {"delegation", delegation},
        {"memory", memory},
        {"costs", costs_json(s.machine.costs)},
        {"devices", devices_json(s.machine.devices)}}},
      {"cell",
       {{"name", s.cell.name},
        {"harts", s.cell.harts},
        {"sources", s.cell.sources},
        {"memory", cell_memory},
        {"comm_page", s.cell.comm_page ? range_json(*s.cell.comm_page) : json(nullptr)},
        {"hugepage_gstage", s.cell.hugepage_gstage}}},
      {"load",
       {{"intensity", s.load.config.intensity},
        {"period", s.load.config.period},
        {"accesses", s.load.config.accesses},
        {"harts", s.load.harts}}},
      {"hypervisor", {{"hv_ipi_shortcut", s.hv_ipi_shortcut}}},
      {"trace", s.trace},
  };
}

RunSpec spec_from_json(const json& j, RunSpec s) {
  Reader r(j, "");
  if (const json* v = r.find("benchmark")) s.benchmark = parse_enum<BenchmarkKind>(*v, "benchmark", parse_benchmark);
  if (const json* v = r.find("scenario")) s.scenario = parse_enum<Scenario>(*v, "scenario", parse_scenario);
  if (const json* v = r.find("irqchip")) s.irqchip = parse_enum<IrqChip>(*v, "irqchip", parse_irqchip);
  r.get("seed", s.seed);
  r.get("iterations", s.params.iterations);
  r.get("trace", s.trace);
  r.find("version");
  if (const json* v = r.find("params")) {
    Reader p(*v, "params");
    p.get("period", s.params.period);
    p.get("irq_period", s.params.irq_period);
    p.get("source", s.params.source);
    p.get("hart", s.params.hart);
    p.get("peer", s.params.peer);
    p.finish();
  }
  if (const json* v = r.find("machine")) {
    Reader m(*v, "machine");
    m.get("harts", s.machine.harts);
    if (const json* d = m.find("delegation")) {
      if (!d->is_object()) throw ConfigError("machine.delegation: expected an object");
      s.machine.delegation.clear();
      for (auto it = d->begin(); it != d->end(); ++it) {
        if (!it->is_string()) throw ConfigError(fmt::format("machine.delegation.{}: expected a mode", it.key()));
        s.machine.delegation[it.key()] = it->get<std::string>();
      }
    }
    if (const json* mem = m.find("memory")) {
      RangeSet set;
      for (const MemRange& range : read_ranges(*mem, "machine.memory")) set.add(range);
      s.machine.memory = set;
    }
    if (const json* c = m.find("costs")) read_costs(*c, "machine.costs", s.machine.costs);
    if (const json* d = m.find("devices")) read_devices(*d, "machine.devices", s.machine.devices);
    m.finish();
  }
  if (const json* v = r.find("cell")) {
    Reader c(*v, "cell");
    c.get("name", s.cell.name);
    c.get_list("harts", s.cell.harts);
    c.get_list("sources", s.cell.sources);
    if (const json* mem = c.find("memory")) s.cell.memory = read_ranges(*mem, "cell.memory");
    if (const json* cp = c.find("comm_page"))
      s.cell.comm_page = cp->is_null() ? std::nullopt : std::optional<MemRange>(read_range(*cp, "cell.comm_page"));
    c.get("hugepage_gstage", s.cell.hugepage_gstage);
    c.finish();
  }
  if (const json* v = r.find("load")) {
    Reader l(*v, "load");
    l.get("intensity", s.load.config.intensity);
    l.get("period", s.load.config.period);
    l.get("accesses", s.load.config.accesses);
    l.get_list("harts", s.load.harts);
    l.finish();
  }
  if (const json* v = r.find("hypervisor")) {
    Reader h(*v, "hypervisor");
    h.get("hv_ipi_shortcut", s.hv_ipi_shortcut);
    h.finish();
  }
  r.finish();
  return s;
}

RunSpec load_spec_file(const std::string& path, RunSpec base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path, e.what()));
  }
  return spec_from_json(j, std::move(base));
}

}  // namespace partsim
