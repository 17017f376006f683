// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <string_view>

#include "partsim/scenarios/summary.hpp"

namespace partsim {

struct HistogramSeries {
  std::string label;
  Histogram histogram;
};

/// Log-log bar plot on the fixed bin edges: x in cycles over [1, 1e6], y in
/// iterations per bin. Series share each bin side by side. Empty bins draw
/// nothing. Output depends only on the input.
std::string render_histogram(std::span<const HistogramSeries> series, std::string_view title);
std::string render_histogram(const Summary& summary, std::string_view label, std::string_view title);

}  // namespace partsim
