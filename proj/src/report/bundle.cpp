// SPDX-License-Identifier: Apache-2.0
#include "partsim/report/bundle.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include <fmt/core.h>

#include "partsim/report/serialize.hpp"
#include "partsim/report/svg.hpp"

namespace partsim {

namespace fs = std::filesystem;

std::optional<OutputFormat> parse_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  if (text == "svg") return OutputFormat::Svg;
  if (text == "all") return OutputFormat::All;
  return std::nullopt;
}

std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Svg: return "svg";
    case OutputFormat::All: return "all";
  }
  return "?";
}

nlohmann::json manifest_json(const RunSpec& spec) {
  nlohmann::json j = spec_to_json(spec);
  j["version"] = PARTSIM_VERSION;
  return j;
}

namespace {

void write_file(const fs::path& path, const std::string& content, std::vector<fs::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", path.string()));
  written.push_back(path);
}

bool wants(OutputFormat selected, OutputFormat f) { return selected == OutputFormat::All || selected == f; }

std::string title_of(const RunSpec& s) {
  return fmt::format("{} / scenario {} / {}", to_string(s.benchmark), to_string(s.scenario), to_string(s.irqchip));
}

}  // namespace

std::vector<fs::path> write_bundle(const fs::path& dir, const ResultSet& result, OutputFormat format) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  if (wants(format, OutputFormat::Json)) write_file(dir / "summary.json", dump(result_to_json(result)), written);
  if (wants(format, OutputFormat::Csv)) {
    std::ostringstream csv;
    write_samples_csv(csv, result);
    write_file(dir / "samples.csv", csv.str(), written);
  }
  if (wants(format, OutputFormat::Svg)) {
    const std::string label = fmt::format("scenario {}", to_string(result.spec.scenario));
    write_file(dir / "histogram.svg", render_histogram(result.summary, label, title_of(result.spec)), written);
  }
  write_file(dir / "manifest.json", dump(manifest_json(result.spec)), written);
  if (!result.trace.empty()) {
    std::ostringstream csv;
    Trace t(true);
    for (const TraceRecord& r : result.trace) t.record(r.time, r.hart, r.kind, r.detail);
    t.write_csv(csv);
    write_file(dir / "trace.csv", csv.str(), written);
  }
  return written;
}

std::vector<fs::path> write_sweep(const fs::path& dir, std::span<const ResultSet> results, OutputFormat format) {
  fs::create_directories(dir);
  std::vector<fs::path> written;
  nlohmann::json all = nlohmann::json::array();
  std::map<std::string, std::vector<HistogramSeries>> overlays;
  for (const ResultSet& r : results) {
    auto files = write_bundle(dir / r.spec.label(), r, format);
    written.insert(written.end(), files.begin(), files.end());
    all.push_back(result_to_json(r));
    const std::string key = fmt::format("{}-{}", to_string(r.spec.benchmark), to_string(r.spec.irqchip));
    overlays[key].push_back({fmt::format("scenario {}", to_string(r.spec.scenario)), r.summary.histogram});
  }
  if (wants(format, OutputFormat::Json)) write_file(dir / "sweep.json", dump(all), written);
  if (wants(format, OutputFormat::Svg)) {
    for (const auto& [key, series] : overlays) write_file(dir / (key + ".svg"), render_histogram(series, key), written);
  }
  return written;
}

}  // namespace partsim
