// SPDX-License-Identifier: Apache-2.0
// partsim command-line front end.
//
// Exit status: 0 success, 1 I/O or other runtime failure, 2 usage or
// configuration error, 3 simulation protocol violation.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "partsim/report/bundle.hpp"
#include "partsim/report/serialize.hpp"
#include "partsim/scenarios/compare.hpp"
#include "partsim/scenarios/run.hpp"
#include "partsim/scenarios/sweep.hpp"

namespace {

using namespace partsim;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitProtocol = 3;

int fail(int code, std::string message) {
  for (char& c : message)
    if (c == '\n' || c == '\r') c = ' ';
  std::cerr << "error: " << message << "\n";
  return code;
}

struct SpecFlags {
  std::string config;
  std::string benchmark;
  std::string scenario;
  std::string irqchip;
  std::optional<std::uint64_t> iterations;
  std::optional<std::uint64_t> seed;
  std::optional<double> intensity;
  bool trace = false;

  void add_to(CLI::App& cmd, bool selectors) {
    cmd.add_option("--config", config, "Config file (JSON); default from $PARTSIM_CONFIG");
    if (selectors) {
      cmd.add_option("--benchmark", benchmark, "timer-jitter | ipi-rtt | plic-path | sync-trap (default timer-jitter)");
      cmd.add_option("--scenario", scenario, "A (bare metal) | B (partitioned) | C (partitioned + load) (default B)");
      cmd.add_option("--irqchip", irqchip, "plic_clint | aia_direct | aia_msi (default plic_clint)");
    }
    cmd.add_option("--iterations", iterations, "Benchmark iterations (default 10000)");
    cmd.add_option("--seed", seed, "Random seed (default 1)");
    cmd.add_option("--intensity", intensity, "Scenario C load intensity in [0,1] (default 1.0)");
    cmd.add_flag("--trace", trace, "Record the architectural event trace (trace.csv)");
  }

  /// Defaults, then the config file, then flags.
  RunSpec resolve() const {
    RunSpec spec;
    std::string path = config;
    if (path.empty()) {
      if (const char* env = std::getenv("PARTSIM_CONFIG"); env != nullptr && *env != '\0') path = env;
    }
    if (!path.empty()) {
      if (!std::filesystem::exists(path)) throw ConfigError(fmt::format("config file '{}' does not exist", path));
      spec = load_spec_file(path, spec);
    }
    if (!benchmark.empty()) {
      const auto b = parse_benchmark(benchmark);
      if (!b) throw ConfigError(fmt::format("unknown benchmark '{}'", benchmark));
      spec.benchmark = *b;
    }
    if (!scenario.empty()) {
      const auto s = parse_scenario(scenario);
      if (!s) throw ConfigError(fmt::format("unknown scenario '{}'", scenario));
      spec.scenario = *s;
    }
    if (!irqchip.empty()) {
      const auto c = parse_irqchip(irqchip);
      if (!c) throw ConfigError(fmt::format("unknown irqchip '{}'", irqchip));
      spec.irqchip = *c;
    }
    if (iterations) spec.params.iterations = *iterations;
    if (seed) spec.seed = *seed;
    if (intensity) spec.load.config.intensity = *intensity;
    if (trace) spec.trace = true;
    spec.validate();
    return spec;
  }
};

OutputFormat format_of(const std::string& text) {
  const auto f = parse_format(text);
  if (!f) throw ConfigError(fmt::format("unknown format '{}'", text));
  return *f;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::vector<std::string>& items, Parse parse, std::string_view what,
                          std::span<const T> all) {
  if (items.empty()) return {all.begin(), all.end()};
  std::vector<T> out;
  for (const std::string& s : items) {
    const auto v = parse(s);
    if (!v) throw ConfigError(fmt::format("unknown {} '{}'", what, s));
    out.push_back(*v);
  }
  return out;
}

void print_result_line(const ResultSet& r) {
  const Summary& s = r.summary;
  std::cout << fmt::format("{}: n={} min={} median={} p99={} max={} hs_traps/iter={} m_entries/iter={}\n",
                           r.spec.label(), s.count, s.min, s.median, s.p99, s.max, s.hs_traps_per_iteration,
                           s.m_entries_per_iteration);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partsim: interrupt-path simulator for a statically partitioned RISC-V system"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(PARTSIM_VERSION));

  SpecFlags run_flags;
  std::string run_out = "partsim-out";
  std::string run_format = "all";
  CLI::App* run_cmd = app.add_subcommand("run", "Run one benchmark and write a report bundle");
  run_flags.add_to(*run_cmd, true);
  run_cmd->add_option("--out", run_out, "Output directory (default partsim-out)");
  run_cmd->add_option("--format", run_format, "csv | json | svg | all (default all); manifest.json is always written");

  std::string base_path;
  std::string other_path;
  bool compare_json = false;
  CLI::App* compare_cmd = app.add_subcommand("compare", "Compare two summary.json files");
  compare_cmd->add_option("--base", base_path, "Baseline summary.json")->required();
  compare_cmd->add_option("--other", other_path, "Other summary.json")->required();
  compare_cmd->add_flag("--json", compare_json, "Print the comparison as JSON");

  SpecFlags sweep_flags;
  std::vector<std::string> sweep_benchmarks;
  std::vector<std::string> sweep_scenarios;
  std::vector<std::string> sweep_irqchips;
  std::string sweep_out = "partsim-sweep";
  std::string sweep_format = "all";
  int threads = 0;
  bool serial = false;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run benchmarks x scenarios x irqchips in parallel");
  sweep_flags.add_to(*sweep_cmd, false);
  sweep_cmd->add_option("--benchmarks", sweep_benchmarks, "Benchmarks to include (default all)")->delimiter(',');
  sweep_cmd->add_option("--scenarios", sweep_scenarios, "Scenarios to include (default A,B,C)")->delimiter(',');
  sweep_cmd->add_option("--irqchips", sweep_irqchips, "Interrupt controllers to include (default all)")->delimiter(',');
  sweep_cmd->add_option("--out", sweep_out, "Output directory (default partsim-sweep)");
  sweep_cmd->add_option("--format", sweep_format, "csv | json | svg | all (default all)");
  sweep_cmd->add_option("--threads", threads, "Worker threads (default: OpenMP default)");
  sweep_cmd->add_flag("--serial", serial, "Use the serial reference runner");

  app.add_subcommand("list-benchmarks", "List the available benchmarks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitUsage, e.what());
  }

  try {
    if (app.got_subcommand("list-benchmarks")) {
      for (BenchmarkKind k : kAllBenchmarks) std::cout << fmt::format("{:<14} {}\n", cli_name(k), describe(k));
      return 0;
    }
    if (run_cmd->parsed()) {
      const RunSpec spec = run_flags.resolve();
      const OutputFormat format = format_of(run_format);
      const ResultSet result = run(spec);
      write_bundle(run_out, result, format);
      print_result_line(result);
      return 0;
    }
    if (compare_cmd->parsed()) {
      const ResultSet base = load_result_file(base_path);
      const ResultSet other = load_result_file(other_path);
      const Comparison c = compare(base, other);
      std::cout << (compare_json ? dump(comparison_to_json(c)) : format_comparison(c));
      return 0;
    }
    if (sweep_cmd->parsed()) {
      const RunSpec base = sweep_flags.resolve();
      const OutputFormat format = format_of(sweep_format);
      const auto benchmarks = parse_list<BenchmarkKind>(sweep_benchmarks, parse_benchmark, "benchmark",
                                                        std::span<const BenchmarkKind>(kAllBenchmarks));
      const auto scenarios =
          parse_list<Scenario>(sweep_scenarios, parse_scenario, "scenario", std::span<const Scenario>(kAllScenarios));
      const auto irqchips =
          parse_list<IrqChip>(sweep_irqchips, parse_irqchip, "irqchip", std::span<const IrqChip>(kAllIrqChips));
      const std::vector<RunSpec> specs = sweep_grid(base, benchmarks, scenarios, irqchips);
      for (const RunSpec& s : specs) s.validate();
      const std::vector<ResultSet> results = serial ? run_sweep_serial(specs) : run_sweep_parallel(specs, threads);
      write_sweep(sweep_out, results, format);
      for (const ResultSet& r : results) print_result_line(r);
      return 0;
    }
  } catch (const ConfigError& e) {
    return fail(kExitUsage, e.what());
  } catch (const CellError& e) {
    return fail(kExitUsage, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kExitUsage, e.what());
  } catch (const ProtocolViolation& e) {
    return fail(kExitProtocol, e.what());
  } catch (const SimulationError& e) {
    return fail(kExitProtocol, e.what());
  } catch (const std::exception& e) {
    return fail(kExitRuntime, e.what());
  }
  return fail(kExitUsage, "no command given");
}
