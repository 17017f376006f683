// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "partsim/report/bundle.hpp"
#include "partsim/report/serialize.hpp"
#include "partsim/report/svg.hpp"
#include "partsim/scenarios/run.hpp"

using namespace partsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("partsim_test_" + name);
  fs::remove_all(p);
  return p;
}

RunSpec small(BenchmarkKind b, Scenario s, std::uint64_t iterations = 200) {
  RunSpec spec;
  spec.benchmark = b;
  spec.scenario = s;
  spec.params.iterations = iterations;
  return spec;
}

std::vector<std::string> bar_rects(const std::string& svg) {
  std::vector<std::string> out;
  std::istringstream in(svg);
  for (std::string line; std::getline(in, line);) {
    if (line.find("<rect") != std::string::npos && line.find("fill=") == std::string::npos) out.push_back(line);
  }
  return out;
}

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult cli(const std::string& args, const std::string& tag) {
  const fs::path dir = scratch("cli_" + tag);
  fs::create_directories(dir);
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string("cd '") + dir.string() + "' && env -u PARTSIM_CONFIG '" + PARTSIM_CLI + "' " +
                          args + " > '" + out.string() + "' 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST(Bundle, SameSpecGivesIdenticalFiles) {
  const RunSpec spec = small(BenchmarkKind::PlicPath, Scenario::C);
  const fs::path a = scratch("bundle_a");
  const fs::path b = scratch("bundle_b");
  const auto files_a = write_bundle(a, run(spec), OutputFormat::All);
  const auto files_b = write_bundle(b, run(spec), OutputFormat::All);
  ASSERT_EQ(files_a.size(), files_b.size());
  std::set<std::string> names;
  for (std::size_t i = 0; i < files_a.size(); ++i) {
    names.insert(files_a[i].filename().string());
    EXPECT_EQ(files_a[i].filename(), files_b[i].filename());
    EXPECT_EQ(slurp(files_a[i]), slurp(files_b[i])) << files_a[i];
  }
  EXPECT_EQ(names, (std::set<std::string>{"manifest.json", "summary.json", "samples.csv", "histogram.svg"}));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Bundle, FormatSelectsFiles) {
  const fs::path dir = scratch("bundle_fmt");
  const auto files = write_bundle(dir, run(small(BenchmarkKind::SyncTrap, Scenario::A, 20)), OutputFormat::Csv);
  std::set<std::string> names;
  for (const auto& f : files) names.insert(f.filename().string());
  EXPECT_EQ(names, (std::set<std::string>{"manifest.json", "samples.csv"}));
  fs::remove_all(dir);
}

TEST(Bundle, ManifestReloadsAsConfig) {
  RunSpec spec = small(BenchmarkKind::IpiRtt, Scenario::B, 50);
  spec.seed = 99;
  const fs::path dir = scratch("bundle_manifest");
  write_bundle(dir, run(spec), OutputFormat::Json);
  const RunSpec back = load_spec_file((dir / "manifest.json").string());
  EXPECT_EQ(spec_to_json(back), spec_to_json(spec));
  fs::remove_all(dir);
}

TEST(Serialize, SummaryRoundTrip) {
  const ResultSet r = run(small(BenchmarkKind::TimerJitter, Scenario::C));
  EXPECT_EQ(summary_from_json(summary_to_json(r.summary)), r.summary);
  const ResultSet back = result_from_json(result_to_json(r));
  EXPECT_EQ(back.summary, r.summary);
  EXPECT_EQ(spec_to_json(back.spec), spec_to_json(r.spec));
}

TEST(Serialize, PlicCsvHasPhaseRows) {
  const ResultSet r = run(small(BenchmarkKind::PlicPath, Scenario::B, 5));
  std::ostringstream out;
  write_samples_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "benchmark,scenario,irqchip,iteration,cycles,hs_traps,m_entries,phase,seed");
  int rows = 0, claims = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.find(",claim,") != std::string::npos) ++claims;
  }
  EXPECT_EQ(rows, 15);
  EXPECT_EQ(claims, 5);
}

TEST(Svg, MatchesGolden) {
  // fixed synthetic input so the golden file does not depend on cost tuning
  std::vector<Cycles> c;
  for (Cycles v = 1; v < 500000; v = v * 3 / 2 + 7) c.push_back(v);
  c.push_back(40);
  c.push_back(40);
  const Summary s = summarize_cycles(c);
  const std::string svg = render_histogram(s, "example", "golden histogram");
  const fs::path golden = fs::path(PARTSIM_GOLDEN_DIR) / "histogram.svg";
  if (std::getenv("PARTSIM_UPDATE_GOLDEN") != nullptr) {
    std::ofstream(golden, std::ios::binary) << svg;
  }
  ASSERT_TRUE(fs::exists(golden)) << "set PARTSIM_UPDATE_GOLDEN=1 to create " << golden;
  EXPECT_EQ(svg, slurp(golden));
}

TEST(Svg, SingleBinSingleBar) {
  const std::vector<Cycles> c(50, 3);
  const std::string svg = render_histogram(summarize_cycles(c), "flat", "t");
  EXPECT_EQ(bar_rects(svg).size(), 1u);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Svg, SeriesGetDistinctColoursAndLegend) {
  std::vector<HistogramSeries> series;
  const char* names[] = {"A", "B", "C"};
  for (int i = 0; i < 3; ++i) {
    std::vector<Cycles> c(10, static_cast<Cycles>(10 * (i + 1)));
    series.push_back({names[i], summarize_cycles(c).histogram});
  }
  const std::string svg = render_histogram(series, "three");
  EXPECT_EQ(bar_rects(svg).size(), 3u);
  // bars inherit the colour of their enclosing series group
  std::set<std::string> colours;
  std::string group;
  std::istringstream in(svg);
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("<g fill=\"", 0) == 0) group = line.substr(9, line.find('"', 9) - 9);
    if (line.rfind("</g>", 0) == 0) group.clear();
    if (line.rfind("<rect", 0) == 0 && line.find("fill=") == std::string::npos) {
      ASSERT_FALSE(group.empty()) << line;
      colours.insert(group);
    }
  }
  EXPECT_EQ(colours.size(), 3u);
  const auto legend = svg.find("<g class=\"legend\">");
  ASSERT_NE(legend, std::string::npos);
  const auto legend_end = svg.find("</g>", legend);
  const std::string block = svg.substr(legend, legend_end - legend);
  for (const char* n : names) EXPECT_NE(block.find(std::string(">") + n + "<"), std::string::npos) << n;
}

TEST(Svg, EmptyHistogramDrawsNoBars) {
  const std::vector<HistogramSeries> series{{"none", Histogram{}}};
  EXPECT_TRUE(bar_rects(render_histogram(series, "empty")).empty());
}

TEST(Cli, RunWritesBundle) {
  const CliResult r = cli("run --benchmark sync-trap --scenario A --iterations 20 --out o", "run");
  EXPECT_EQ(r.code, 0) << r.err;
  const fs::path out = fs::temp_directory_path() / "partsim_test_cli_run" / "o";
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_TRUE(fs::exists(out / "samples.csv"));
  EXPECT_TRUE(fs::exists(out / "histogram.svg"));
  EXPECT_NE(r.out.find("sync_trap"), std::string::npos) << r.out;
}

TEST(Cli, BadScenarioIsUsageError) {
  const CliResult r = cli("run --scenario Z --iterations 5", "badscen");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error:", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
}

TEST(Cli, MissingConfigIsUsageError) {
  const CliResult r = cli("run --config /nonexistent/partsim.json --iterations 5", "nocfg");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error:", 0), 0u) << r.err;
}

TEST(Cli, UnknownConfigKeyIsUsageError) {
  const fs::path cfg = fs::temp_directory_path() / "partsim_test_badkey.json";
  std::ofstream(cfg) << R"({"params": {"iterations": 5}})";
  const CliResult r = cli("run --config '" + cfg.string() + "'", "badkey");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("params.iterations"), std::string::npos) << r.err;
}

TEST(Cli, ProtocolViolationExitsThree) {
  // route the virtual timer to the hypervisor, which has no handler for it
  const fs::path cfg = fs::temp_directory_path() / "partsim_test_violation.json";
  std::ofstream(cfg) << R"({"machine": {"delegation": {"VS-timer": "HS"}}})";
  const CliResult r = cli("run --config '" + cfg.string() + "' --benchmark timer-jitter --scenario B --iterations 5",
                          "violation");
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("VS-timer"), std::string::npos) << r.err;
  EXPECT_EQ(r.err.rfind("error:", 0), 0u) << r.err;
}

TEST(Cli, CompareTwoRuns) {
  ASSERT_EQ(cli("run --benchmark plic-path --scenario A --iterations 20 --out a", "cmp").code, 0);
  const fs::path base = fs::temp_directory_path() / "partsim_test_cli_cmp" / "a" / "summary.json";
  const fs::path keep = fs::temp_directory_path() / "partsim_test_cmp_base.json";
  fs::copy_file(base, keep, fs::copy_options::overwrite_existing);
  ASSERT_EQ(cli("run --benchmark plic-path --scenario B --iterations 20 --out b", "cmp").code, 0);
  const fs::path other = fs::temp_directory_path() / "partsim_test_cli_cmp" / "b" / "summary.json";
  const CliResult r = cli("compare --base '" + keep.string() + "' --other '" + other.string() + "'", "cmp2");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("median"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("+3"), std::string::npos) << r.out;
}

TEST(Cli, ListBenchmarks) {
  const CliResult r = cli("list-benchmarks", "list");
  EXPECT_EQ(r.code, 0);
  for (const char* n : {"timer-jitter", "ipi-rtt", "plic-path", "sync-trap"}) EXPECT_NE(r.out.find(n), std::string::npos);
}
