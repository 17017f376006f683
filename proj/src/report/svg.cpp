// SPDX-License-Identifier: Apache-2.0
#include "partsim/report/svg.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace partsim {

namespace {

constexpr double kWidth = 760;
constexpr double kHeight = 440;
constexpr double kLeft = 72;
constexpr double kRight = 24;
constexpr double kTop = 44;
constexpr double kBottom = 64;
constexpr double kPlotW = kWidth - kLeft - kRight;
constexpr double kPlotH = kHeight - kTop - kBottom;
// Bars start at half an iteration so a bin holding one sample stays visible.
constexpr double kFloor = 0.5;

constexpr std::string_view kPalette[] = {"#1b6ca8", "#c0392b", "#2e8b57", "#b8860b", "#6a5acd", "#555555"};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_histogram(std::span<const HistogramSeries> series, std::string_view title) {
  std::uint64_t peak = 1;
  for (const auto& s : series)
    for (std::uint64_t c : s.histogram.counts) peak = std::max(peak, c);
  int top_decade = 1;
  while (std::pow(10.0, top_decade) < static_cast<double>(peak)) ++top_decade;
  const double y_lo = std::log10(kFloor);
  const double y_hi = static_cast<double>(top_decade);
  const auto y_of = [&](double count) { return kTop + kPlotH - (std::log10(count) - y_lo) / (y_hi - y_lo) * kPlotH; };
  const double bin_w = kPlotW / Histogram::kBins;
  const double x0 = kLeft;

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight, kWidth, kHeight);
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"#ffffff\"/>\n", kWidth, kHeight);
  svg += fmt::format("<text x=\"{:.1f}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", kWidth / 2,
                     escape(title));

  // Grid and ticks.
  svg += "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (int d = 0; d <= Histogram::kDecades; ++d) {
    const double x = x0 + d * Histogram::kBinsPerDecade * bin_w;
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", x, kTop, x, kTop + kPlotH);
  }
  for (int d = 0; d <= top_decade; ++d) {
    const double y = y_of(std::pow(10.0, d));
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", kLeft, y, kLeft + kPlotW, y);
  }
  svg += "</g>\n<g fill=\"#333333\">\n";
  for (int d = 0; d <= Histogram::kDecades; ++d) {
    const double x = x0 + d * Histogram::kBinsPerDecade * bin_w;
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">1e{}</text>\n", x, kTop + kPlotH + 18, d);
  }
  for (int d = 0; d <= top_decade; ++d) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">1e{}</text>\n", kLeft - 8,
                       y_of(std::pow(10.0, d)) + 4, d);
  }
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">cycles</text>\n", kLeft + kPlotW / 2,
                     kHeight - 20);
  svg += fmt::format("<text x=\"18\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2f})\">"
                     "iterations</text>\n",
                     kTop + kPlotH / 2, kTop + kPlotH / 2);
  svg += "</g>\n";

  // Bars.
  const double sub_w = bin_w / static_cast<double>(std::max<std::size_t>(series.size(), 1));
  for (std::size_t s = 0; s < series.size(); ++s) {
    const std::string_view color = kPalette[s % std::size(kPalette)];
    svg += fmt::format("<g fill=\"{}\" fill-opacity=\"0.85\">\n", color);
    for (int b = 0; b < Histogram::kBins; ++b) {
      const std::uint64_t c = series[s].histogram.counts[static_cast<std::size_t>(b)];
      if (c == 0) continue;
      const double x = x0 + b * bin_w + static_cast<double>(s) * sub_w;
      const double y = y_of(static_cast<double>(c));
      svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\"/>\n", x, y, sub_w,
                         kTop + kPlotH - y);
    }
    svg += "</g>\n";
  }

  // Axes and legend.
  svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"#333333\"/>\n",
                     kLeft, kTop, kPlotW, kPlotH);
  svg += "<g class=\"legend\">\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = kTop + 10 + 18 * static_cast<double>(s);
    const double x = kLeft + kPlotW - 150;
    svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n", x, y,
                       kPalette[s % std::size(kPalette)]);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", x + 18, y + 10, escape(series[s].label));
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

std::string render_histogram(const Summary& summary, std::string_view label, std::string_view title) {
  const HistogramSeries one{std::string(label), summary.histogram};
  return render_histogram(std::span<const HistogramSeries>(&one, 1), title);
}

}  // namespace partsim
