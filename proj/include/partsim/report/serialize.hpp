// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "partsim/scenarios/compare.hpp"
#include "partsim/scenarios/run.hpp"

namespace partsim {

nlohmann::json summary_to_json(const Summary& s);
Summary summary_from_json(const nlohmann::json& j);
nlohmann::json stats_to_json(const RunStats& s);

/// Spec, version, summary and run counters. Samples go to CSV.
nlohmann::json result_to_json(const ResultSet& r);
/// Inverse of result_to_json for the parts compare() needs (spec, summary,
/// counters). Throws ConfigError on malformed input.
ResultSet result_from_json(const nlohmann::json& j);
ResultSet load_result_file(const std::string& path);

nlohmann::json comparison_to_json(const Comparison& c);

/// Two-space indented dump with a trailing newline.
std::string dump(const nlohmann::json& j);

/// Header: benchmark,scenario,irqchip,iteration,cycles,hs_traps,m_entries,phase,seed.
/// One row per sample with phase "total"; plic_path writes three rows per
/// iteration (injection, claim, complete) with the trap counts repeated.
void write_samples_csv(std::ostream& out, const ResultSet& r);

}  // namespace partsim
