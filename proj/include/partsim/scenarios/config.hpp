// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "partsim/devices/bus.hpp"
#include "partsim/devices/irqchip.hpp"
#include "partsim/guests/benchmark.hpp"
#include "partsim/guests/load.hpp"
#include "partsim/hypervisor/cell.hpp"
#include "partsim/machine/cost_model.hpp"

namespace partsim {

/// Invalid or inconsistent run configuration. Raised before simulation starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario : std::uint8_t { A, B, C };

inline constexpr Scenario kAllScenarios[] = {Scenario::A, Scenario::B, Scenario::C};

std::string_view to_string(Scenario scenario);
/// "A"/"B"/"C" (any case) or bare-metal / partitioned / loaded.
std::optional<Scenario> parse_scenario(std::string_view text);
inline bool has_hypervisor(Scenario s) { return s != Scenario::A; }

struct BenchmarkParams {
  std::uint64_t iterations = 10000;
  /// Timer period.
  Cycles period = 100000;
  /// Gap between completing one external interrupt and raising the next.
  Cycles irq_period = 5000;
  SourceId source = 12;
  HartId hart = 4;
  HartId peer = 5;
};

/// The partition that hosts the benchmark in scenarios B and C.
struct CellSpec {
  std::string name = "bench";
  std::vector<HartId> harts{4, 5};
  std::vector<SourceId> sources{12};
  std::vector<MemRange> memory{MemRange{0xA0000000, 0x10000000}};
  std::optional<MemRange> comm_page = MemRange{0xBFFFF000, 0x1000};
  bool hugepage_gstage = false;

  CellConfig to_config() const;
};

struct MachineSpec {
  unsigned harts = 6;
  /// Per-interrupt routing overrides ("VS-timer" -> "HS", ...).
  std::map<std::string, std::string> delegation;
  RangeSet memory{MemRange{0x80000000, 0x40000000}};
  CostModel costs;
  DeviceLayout devices;
};

struct LoadSpec {
  LoadConfig config;
  std::vector<HartId> harts{0, 1, 2, 3};
};

/// Everything that determines a run (together with the code version).
struct RunSpec {
  BenchmarkKind benchmark = BenchmarkKind::TimerJitter;
  Scenario scenario = Scenario::B;
  IrqChip irqchip = IrqChip::PlicClint;
  std::uint64_t seed = 1;
  BenchmarkParams params;
  MachineSpec machine;
  CellSpec cell;
  LoadSpec load;
  bool hv_ipi_shortcut = false;
  bool trace = false;

  /// Throws ConfigError describing the first problem found.
  void validate() const;
  /// "<benchmark>-<scenario>-<irqchip>".
  std::string label() const;
};

/// Key-value tree form of a RunSpec. Addresses are written as hex strings.
nlohmann::json spec_to_json(const RunSpec& spec);
/// Overlays the keys present in `j` onto `base`. Unknown keys, wrong types
/// and unparsable enum names raise ConfigError naming the key path.
RunSpec spec_from_json(const nlohmann::json& j, RunSpec base = {});
/// Reads a config file (JSON). A "version" key, as written in manifests, is
/// accepted and ignored.
RunSpec load_spec_file(const std::string& path, RunSpec base = {});

}  // namespace partsim
