// SPDX-License-Identifier: Apache-2.0
#include "partsim/report/serialize.hpp"

#include <fstream>
#include <ostream>

#include <fmt/core.h>

namespace partsim {

using nlohmann::json;

namespace {

json counter_json(const InterventionCounter& c) {
  return {{"sbi_moderation", c.sbi_moderation},       {"timer_injection", c.timer_injection},
          {"ipi_injection", c.ipi_injection},         {"external_injection", c.external_injection},
          {"plic_emulation", c.plic_emulation},       {"denied", c.denied},
          {"other", c.other},                         {"total", c.total()}};
}

InterventionCounter counter_from_json(const json& j) {
  InterventionCounter c;
  c.sbi_moderation = j.at("sbi_moderation").get<std::uint64_t>();
  c.timer_injection = j.at("timer_injection").get<std::uint64_t>();
  c.ipi_injection = j.at("ipi_injection").get<std::uint64_t>();
  c.external_injection = j.at("external_injection").get<std::uint64_t>();
  c.plic_emulation = j.at("plic_emulation").get<std::uint64_t>();
  c.denied = j.at("denied").get<std::uint64_t>();
  c.other = j.at("other").get<std::uint64_t>();
  return c;
}

json claims_json(const ClaimCounters& c) {
  return {{"assertions", c.assertions}, {"coalesced", c.coalesced},     {"claims", c.claims},
          {"empty_claims", c.empty_claims}, {"completions", c.completions}, {"protocol_violations", c.protocol_violations}};
}

}  // namespace

json summary_to_json(const Summary& s) {
  json bins = json::array();
  for (std::uint64_t c : s.histogram.counts) bins.push_back(c);
  return {
      {"count", s.count},
      {"min", s.min},
      {"median", s.median},
      {"p99", s.p99},
      {"max", s.max},
      {"mean", s.mean},
      {"histogram", {{"bins_per_decade", Histogram::kBinsPerDecade}, {"low", 1}, {"high", 1000000}, {"counts", bins}}},
      {"hs_traps_per_iteration", s.hs_traps_per_iteration},
      {"m_entries_per_iteration", s.m_entries_per_iteration},
      {"trap_counts_constant", s.trap_counts_constant},
      {"interventions", counter_json(s.interventions)},
      {"hs_entries", s.hs_entries},
      {"m_entries", s.m_entries},
  };
}

Summary summary_from_json(const json& j) {
  Summary s;
  s.count = j.at("count").get<std::uint64_t>();
  s.min = j.at("min").get<Cycles>();
  s.median = j.at("median").get<Cycles>();
  s.p99 = j.at("p99").get<Cycles>();
  s.max = j.at("max").get<Cycles>();
  s.mean = j.at("mean").get<double>();
  const json& counts = j.at("histogram").at("counts");
  if (counts.size() != s.histogram.counts.size()) throw ConfigError("histogram has the wrong number of bins");
  for (std::size_t i = 0; i < counts.size(); ++i) s.histogram.counts[i] = counts[i].get<std::uint64_t>();
  s.hs_traps_per_iteration = j.at("hs_traps_per_iteration").get<std::uint64_t>();
  s.m_entries_per_iteration = j.at("m_entries_per_iteration").get<std::uint64_t>();
  s.trap_counts_constant = j.at("trap_counts_constant").get<bool>();
  s.interventions = counter_from_json(j.at("interventions"));
  s.hs_entries = j.at("hs_entries").get<std::uint64_t>();
  s.m_entries = j.at("m_entries").get<std::uint64_t>();
  return s;
}

json stats_to_json(const RunStats& s) {
  return {
      {"hypervisor_present", s.hypervisor_present},
      {"hs_entries", s.hs_entries},
      {"m_entries", s.m_entries},
      {"interventions", counter_json(s.interventions)},
      {"plic", claims_json(s.plic)},
      {"aplic_direct", claims_json(s.aplic_direct)},
      {"aplic_msi_forwards", s.aplic_msi_forwards},
      {"imsic",
       {{"msi_writes", s.imsic.msi_writes},
        {"eip_sets", s.imsic.eip_sets},
        {"absorbed_writes", s.imsic.absorbed_writes},
        {"ignored_writes", s.imsic.ignored_writes},
        {"claims", s.imsic.claims}}},
      {"pending", {{"rises", s.pending_rises}, {"falls", s.pending_falls}, {"redundant_sets", s.pending_redundant}}},
      {"mailbox", {{"posted", s.mailbox_posted}, {"taken", s.mailbox_taken}}},
      {"ipi_mismatches", s.ipi_mismatches},
      {"load_bursts", s.load_bursts},
      {"events", s.events},
      {"end_time", s.end_time},
      {"diagnostics", s.diagnostics},
  };
}

json result_to_json(const ResultSet& r) {
  return {
      {"version", r.version},
      {"spec", spec_to_json(r.spec)},
      {"summary", summary_to_json(r.summary)},
      {"stats", stats_to_json(r.stats)},
  };
}

ResultSet result_from_json(const json& j) {
  try {
    ResultSet r;
    r.version = j.at("version").get<std::string>();
    r.spec = spec_from_json(j.at("spec"));
    r.summary = summary_from_json(j.at("summary"));
    if (j.contains("stats")) {
      const json& s = j.at("stats");
      r.stats.hypervisor_present = s.at("hypervisor_present").get<bool>();
      r.stats.hs_entries = s.at("hs_entries").get<std::uint64_t>();
      r.stats.m_entries = s.at("m_entries").get<std::uint64_t>();
      r.stats.interventions = counter_from_json(s.at("interventions"));
    }
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("malformed result file: {}", e.what()));
  }
}

ResultSet load_result_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open result file '{}'", path));
  try {
    return result_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("result file '{}' is not valid JSON: {}", path, e.what()));
  }
}

json comparison_to_json(const Comparison& c) {
  json metrics = json::array();
  for (const MetricRatio& m : c.metrics)
    metrics.push_back({{"metric", m.metric}, {"base", m.base}, {"other", m.other},
                       {"ratio", m.ratio ? json(*m.ratio) : json(nullptr)}});
  return {{"benchmark", std::string(to_string(c.benchmark))},
          {"base", c.base_label},
          {"other", c.other_label},
          {"metrics", metrics},
          {"hs_trap_delta", c.hs_trap_delta},
          {"m_entry_delta", c.m_entry_delta},
          {"verdict", std::string(to_string(c.verdict))}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_samples_csv(std::ostream& out, const ResultSet& r) {
  const std::string_view bench = to_string(r.spec.benchmark);
  const std::string_view scen = to_string(r.spec.scenario);
  const std::string_view chip = to_string(r.spec.irqchip);
  out << "benchmark,scenario,irqchip,iteration,cycles,hs_traps,m_entries,phase,seed\n";
  const auto row = [&](const BenchmarkSample& s, Cycles cycles, std::string_view phase) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", bench, scen, chip, s.iteration, cycles, s.hs_traps, s.m_entries,
                       phase, r.spec.seed);
  };
  for (const BenchmarkSample& s : r.samples) {
    if (s.phases) {
      row(s, s.phases->injection, "injection");
      row(s, s.phases->claim, "claim");
      row(s, s.phases->complete, "complete");
    } else {
      row(s, s.cycles, "total");
    }
  }
}

}  // namespace partsim
