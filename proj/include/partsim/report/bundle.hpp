// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "partsim/scenarios/run.hpp"

namespace partsim {

enum class OutputFormat : std::uint8_t { Csv, Json, Svg, All };
std::optional<OutputFormat> parse_format(std::string_view text);
std::string_view to_string(OutputFormat f);

/// Run manifest: the spec as a loadable config plus the code version.
nlohmann::json manifest_json(const RunSpec& spec);

/// Writes summary.json, samples.csv and histogram.svg as selected by
/// `format`, always manifest.json, and trace.csv when the run was traced.
/// Creates `dir` if needed. Returns the files written.
std::vector<std::filesystem::path> write_bundle(const std::filesystem::path& dir, const ResultSet& result,
                                                OutputFormat format);

/// One bundle per run in `dir/<label>/`, a combined sweep.json and, per
/// (benchmark, irqchip), an SVG overlaying the scenarios.
std::vector<std::filesystem::path> write_sweep(const std::filesystem::path& dir, std::span<const ResultSet> results,
                                               OutputFormat format);

}  // namespace partsim
