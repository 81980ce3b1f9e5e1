// Copyright 2026 The slicebench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slicebench/stats.hpp"

namespace slicebench {

// Plain-text SVG charts. Output depends only on the inputs; every number is
// printed with a fixed precision so files can be compared byte for byte.

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  std::string label;
};

struct ScatterSummary {
  std::size_t n = 0;
  std::optional<LineFit> fit;
  std::optional<Correlation> pearson;
  std::optional<Correlation> spearman;
  std::vector<std::string> flags;  // "single_point", "no_correlation", "degenerate"
};

/// Least-squares line when at least two distinct x exist, r and p when the
/// correlation is defined. A single point is drawn without a line and
/// flagged.
ScatterSummary summarize_scatter(const std::vector<ScatterPoint>& points);

std::string render_scatter_svg(const std::string& title, const std::string& x_label,
                               const std::string& y_label, const std::vector<ScatterPoint>& points,
                               const ScatterSummary& summary);

struct LineSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (x, y), drawn in the given order
};

/// Line chart; with log2_x the x axis is log2-spaced (intended for k grids).
std::string render_line_svg(const std::string& title, const std::string& x_label,
                            const std::string& y_label, const std::vector<LineSeries>& series,
                            bool log2_x);

struct Bar {
  std::string label;
  double value = 0.0;
  std::optional<double> error;  // drawn as +/- whisker
};

std::string render_bar_svg(const std::string& title, const std::string& y_label,
                           const std::vector<Bar>& bars);

/// Tick positions covering [lo, hi] with a 1-2-5 step.
std::vector<double> nice_ticks(double lo, double hi, int target = 5);

/// Fixed-precision rendering used for all report numbers.
std::string format_number(double v, int digits = 6);

}  // namespace slicebench
