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

#include "slicebench/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "slicebench/error.hpp"

namespace slicebench {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 24.0;
constexpr double kTop = 44.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};

std::string px(double v) {
  const double r = std::round(v * 100.0) / 100.0;
  return fmt::format("{:.2f}", r == 0.0 ? 0.0 : r);
}

std::string escape(const std::string& s) {
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

int tick_decimals(double step) {
  return std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9)));
}

struct Axis {
  double lo = 0.0, hi = 1.0;
  std::vector<double> ticks;
  int decimals = 0;
};

Axis make_axis(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
  Axis a;
  a.ticks = nice_ticks(lo, hi);
  a.lo = std::min(lo, a.ticks.front());
  a.hi = std::max(hi, a.ticks.back());
  a.decimals = a.ticks.size() > 1 ? tick_decimals(a.ticks[1] - a.ticks[0]) : 0;
  return a;
}

struct Frame {
  Axis x, y;
  double to_x(double v) const { return kLeft + (v - x.lo) / (x.hi - x.lo) * (kWidth - kLeft - kRight); }
  double to_y(double v) const {
    return kHeight - kBottom - (v - y.lo) / (y.hi - y.lo) * (kHeight - kTop - kBottom);
  }
};

std::string header(const std::string& title) {
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      px(kWidth), px(kHeight));
  s += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n", px(kWidth),
                   px(kHeight));
  s += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                   px(kWidth / 2), escape(title));
  return s;
}

// Axes, grid and tick labels. x_label_of maps a tick value to its label.
template <typename XLabel>
std::string axes(const Frame& f, const std::string& x_label, const std::string& y_label,
                 const std::vector<double>& x_ticks, XLabel x_label_of) {
  std::string s;
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  for (double t : f.y.ticks) {
    const double y = f.to_y(t);
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#e0e0e0\"/>\n", px(x0), px(y),
                     px(x1), px(y));
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", px(x0 - 6), px(y + 4),
                     fmt::format("{:.{}f}", t, f.y.decimals));
  }
  for (double t : x_ticks) {
    const double x = f.to_x(t);
    s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\"/>\n", px(x), px(y0),
                     px(x), px(y0 + 5));
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px(x), px(y0 + 18),
                     escape(x_label_of(t)));
  }
  s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\"/>\n", px(x0), px(y0),
                   px(x1), px(y0));
  s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\"/>\n", px(x0), px(y0),
                   px(x0), px(y1));
  s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px((x0 + x1) / 2),
                   px(kHeight - 18), escape(x_label));
  s += fmt::format(
      "<text x=\"18\" y=\"{0}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0})\">{1}</text>\n",
      px((y0 + y1) / 2), escape(y_label));
  return s;
}

}  // namespace

std::string format_number(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  return fmt::format("{:.{}g}", v, digits);
}

std::vector<double> nice_ticks(double lo, double hi, int target) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) return {lo};
  const double raw = (hi - lo) / std::max(1, target);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  const double first = std::ceil(lo / step - 1e-9);
  for (double i = first; i * step <= hi + 1e-9 * step; i += 1.0) {
    const double t = i * step;
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  if (ticks.empty()) ticks.push_back(lo);
  return ticks;
}

ScatterSummary summarize_scatter(const std::vector<ScatterPoint>& points) {
  ScatterSummary s;
  s.n = points.size();
  if (points.empty()) fail(ErrorCode::kValidation, "scatter plot needs at least one point");
  if (points.size() == 1) {
    s.flags.push_back("single_point");
    return s;
  }
  std::vector<double> x, y;
  for (const auto& p : points) {
    x.push_back(p.x);
    y.push_back(p.y);
  }
  try {
    s.fit = least_squares(x, y);
  } catch (const Error&) {
    s.flags.push_back("degenerate");
    return s;
  }
  if (points.size() < 3) {
    s.flags.push_back("no_correlation");
    return s;
  }
  try {
    s.pearson = pearson(x, y);
    s.spearman = spearman(x, y);
  } catch (const Error&) {
    s.flags.push_back("no_correlation");
  }
  return s;
}

std::string render_scatter_svg(const std::string& title, const std::string& x_label,
                               const std::string& y_label, const std::vector<ScatterPoint>& points,
                               const ScatterSummary& summary) {
  if (points.empty()) fail(ErrorCode::kValidation, "scatter plot needs at least one point");
  auto [xmin, xmax] = std::minmax_element(points.begin(), points.end(),
                                          [](const auto& a, const auto& b) { return a.x < b.x; });
  auto [ymin, ymax] = std::minmax_element(points.begin(), points.end(),
                                          [](const auto& a, const auto& b) { return a.y < b.y; });
  Frame f{make_axis(xmin->x, xmax->x), make_axis(ymin->y, ymax->y)};
  const int xdec = f.x.decimals;
  std::string s = header(title);
  s += axes(f, x_label, y_label, f.x.ticks, [xdec](double t) { return fmt::format("{:.{}f}", t, xdec); });
  if (summary.fit) {
    const double a = xmin->x, b = xmax->x;
    const double ya = summary.fit->slope * a + summary.fit->intercept;
    const double yb = summary.fit->slope * b + summary.fit->intercept;
    s += fmt::format(
        "<line class=\"fit\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n",
        px(f.to_x(a)), px(f.to_y(ya)), px(f.to_x(b)), px(f.to_y(yb)));
  }
  for (const auto& p : points) {
    s += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#1f77b4\"><title>{}</title></circle>\n",
                     px(f.to_x(p.x)), px(f.to_y(p.y)), escape(p.label));
  }
  std::vector<std::string> notes;
  if (summary.pearson) {
    notes.push_back(fmt::format("Pearson r = {:.3f}, p = {:.3f}", summary.pearson->r, summary.pearson->p));
  }
  if (summary.spearman) {
    notes.push_back(fmt::format("Spearman r = {:.3f}, p = {:.3f}", summary.spearman->r, summary.spearman->p));
  }
  for (const auto& flag : summary.flags) {
    if (flag == "single_point") notes.push_back("single point: no fitted line");
    if (flag == "degenerate") notes.push_back("all x equal: no fitted line");
    if (flag == "no_correlation") notes.push_back("correlation undefined");
  }
  double y = kTop + 14;
  for (const auto& n : notes) {
    s += fmt::format("<text class=\"note\" x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
                     px(kWidth - kRight - 6), px(y), escape(n));
    y += 16;
  }
  s += "</svg>\n";
  return s;
}

std::string render_line_svg(const std::string& title, const std::string& x_label,
                            const std::string& y_label, const std::vector<LineSeries>& series,
                            bool log2_x) {
  std::vector<double> xs, ys;
  for (const auto& ser : series) {
    for (auto [x, y] : ser.points) {
      if (log2_x && !(x > 0.0)) fail(ErrorCode::kValidation, "log2 axis needs positive x");
      xs.push_back(log2_x ? std::log2(x) : x);
      ys.push_back(y);
    }
  }
  if (xs.empty()) fail(ErrorCode::kValidation, "line chart needs at least one point");
  const auto [xlo, xhi] = std::minmax_element(xs.begin(), xs.end());
  const auto [ylo, yhi] = std::minmax_element(ys.begin(), ys.end());
  Frame f{make_axis(*xlo, *xhi), make_axis(std::min(0.0, *ylo), std::max(1.0, *yhi))};
  std::vector<double> x_ticks;
  if (log2_x) {
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    x_ticks = sorted;
  } else {
    x_ticks = f.x.ticks;
  }
  const int xdec = f.x.decimals;
  std::string s = header(title);
  s += axes(f, x_label, y_label, x_ticks, [&](double t) {
    return log2_x ? format_number(std::exp2(t)) : fmt::format("{:.{}f}", t, xdec);
  });
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    std::string pts;
    for (auto [x, y] : series[i].points) {
      const double xv = log2_x ? std::log2(x) : x;
      if (!pts.empty()) pts += ' ';
      pts += px(f.to_x(xv)) + "," + px(f.to_y(y));
    }
    s += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", pts, color);
    for (auto [x, y] : series[i].points) {
      const double xv = log2_x ? std::log2(x) : x;
      s += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n", px(f.to_x(xv)), px(f.to_y(y)), color);
    }
    const double ly = kTop + 14 + 16 * static_cast<double>(i);
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n",
                     px(kWidth - kRight - 150), px(ly - 9), color);
    s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", px(kWidth - kRight - 134), px(ly),
                     escape(series[i].name));
  }
  s += "</svg>\n";
  return s;
}

std::string render_bar_svg(const std::string& title, const std::string& y_label,
                           const std::vector<Bar>& bars) {
  if (bars.empty()) fail(ErrorCode::kValidation, "bar chart needs at least one bar");
  double hi = 1.0, lo = 0.0;
  for (const auto& b : bars) {
    hi = std::max(hi, b.value + b.error.value_or(0.0));
    lo = std::min(lo, b.value - b.error.value_or(0.0));
  }
  Frame f{Axis{0.0, static_cast<double>(bars.size()), {}, 0}, make_axis(lo, hi)};
  f.y.lo = std::min(f.y.lo, 0.0);
  std::vector<double> x_ticks;
  for (std::size_t i = 0; i < bars.size(); ++i) x_ticks.push_back(static_cast<double>(i) + 0.5);
  std::string s = header(title);
  s += axes(f, "", y_label, x_ticks, [&](double t) { return bars[static_cast<std::size_t>(t)].label; });
  const double slot = (kWidth - kLeft - kRight) / static_cast<double>(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double cx = f.to_x(static_cast<double>(i) + 0.5);
    const double top = f.to_y(std::max(bars[i].value, 0.0)), base = f.to_y(std::min(bars[i].value, 0.0));
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n", px(cx - 0.3 * slot),
                     px(top), px(0.6 * slot), px(base - top), kPalette[i % std::size(kPalette)]);
    if (bars[i].error) {
      const double e = *bars[i].error;
      s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>\n", px(cx),
                       px(f.to_y(bars[i].value - e)), px(f.to_y(bars[i].value + e)));
    }
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{:.3f}</text>\n", px(cx), px(top - 6),
                     bars[i].value);
  }
  s += "</svg>\n";
  return s;
}

}  // namespace slicebench
