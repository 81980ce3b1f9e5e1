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

#include <cstdlib>
#include <fstream>

#include <gtest/gtest.h>

#include "slicebench/report.hpp"
#include "support.hpp"

namespace slicebench {
namespace {

namespace fs = std::filesystem;

std::vector<ScatterPoint> line_points() {
  return {{1.0, 0.1, "a"}, {2.0, -0.4, "b"}, {4.0, -1.2, "c & d"}, {8.0, -3.3, "e"}};
}

TEST(Ticks, OneTwoFiveSteps) {
  EXPECT_EQ(nice_ticks(0, 10), (std::vector<double>{0, 2, 4, 6, 8, 10}));
  EXPECT_EQ(nice_ticks(0.3, 7.7), (std::vector<double>{2, 4, 6}));
  const auto t = nice_ticks(0, 1);
  ASSERT_EQ(t.size(), 6u);
  EXPECT_NEAR(t[3], 0.6, 1e-12);
  EXPECT_EQ(nice_ticks(-3, 47, 5), (std::vector<double>{0, 10, 20, 30, 40}));
  EXPECT_EQ(nice_ticks(2, 2), (std::vector<double>{2}));
}

TEST(Scatter, Summary) {
  EXPECT_THROW(summarize_scatter({}), Error);
  const auto one = summarize_scatter({{1.0, 2.0, "x"}});
  EXPECT_EQ(one.n, 1u);
  EXPECT_FALSE(one.fit);
  EXPECT_FALSE(one.pearson);
  EXPECT_EQ(one.flags, (std::vector<std::string>{"single_point"}));
  EXPECT_FALSE(render_scatter_svg("t", "x", "y", {{1.0, 2.0, "x"}}, one).empty());

  const auto s = summarize_scatter(line_points());
  ASSERT_TRUE(s.fit);
  ASSERT_TRUE(s.pearson);
  EXPECT_LT(s.pearson->r, -0.99);
  EXPECT_NEAR(s.spearman->r, -1.0, 1e-15);
}

TEST(Svg, GoldenAndDeterministic) {
  const auto pts = line_points();
  const std::string svg = render_scatter_svg("Delta vs FRD", "FRD", "delta", pts, summarize_scatter(pts));
  EXPECT_EQ(svg, render_scatter_svg("Delta vs FRD", "FRD", "delta", pts, summarize_scatter(pts)));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("c &amp; d"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);

  const fs::path golden = testing::golden_dir() / "scatter.svg";
  if (std::getenv("SLICEBENCH_WRITE_GOLDEN") != nullptr) {
    std::ofstream(golden, std::ios::binary) << svg;
    GTEST_SKIP() << "wrote " << golden;
  }
  EXPECT_EQ(svg, testing::read_text(golden));
}

TEST(Svg, LineAndBarCharts) {
  const std::vector<LineSeries> series{{"features", {{4, 0.4}, {8, 0.5}, {16, 0.6}}},
                                       {"raw", {{4, 0.3}, {8, 0.35}, {16, 0.4}}}};
  const std::string line = render_line_svg("DSC vs k", "k", "DSC", series, true);
  EXPECT_NE(line.find("features"), std::string::npos);
  EXPECT_NE(line.find("polyline"), std::string::npos);
  const std::string bars = render_bar_svg("Accuracy", "acc", {{"a", 0.5, 0.1}, {"b", 0.75, std::nullopt}});
  EXPECT_NE(bars.find("<rect"), std::string::npos);
  EXPECT_EQ(format_number(0.1234567), "0.123457");
  EXPECT_EQ(format_number(2.0, 2), "2");
  EXPECT_EQ(format_number(0.0), "0");
}

}  // namespace
}  // namespace slicebench
