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

#include "slicebench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>
#include <nlohmann/json.hpp>

#include "slicebench/error.hpp"
#include "slicebench/rng.hpp"

namespace slicebench {
namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorCode::kDimension, "correlation inputs differ in length");
  if (x.size() < 3) fail(ErrorCode::kSize, "correlation needs at least 3 samples");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      fail(ErrorCode::kValidation, "correlation inputs must be finite");
    }
  }
}

double coefficient(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::kDegenerate, "correlation of a constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

double correlation_p_value(double r, std::size_t n) {
  if (n < 3) fail(ErrorCode::kSize, "p-value needs at least 3 samples");
  const double one_minus_r2 = 1.0 - r * r;
  if (one_minus_r2 <= 0.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  return std::clamp(boost::math::ibeta(df / 2.0, 0.5, one_minus_r2), 0.0, 1.0);
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const double r = coefficient(x, y);
  return {r, correlation_p_value(r, x.size())};
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    // Positions i..j hold ranks i+1..j+1.
    const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

Correlation spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double r = coefficient(rx, ry);
  return {r, correlation_p_value(r, x.size())};
}

double spearman_permutation_p(std::span<const double> x, std::span<const double> y,
                              std::uint64_t seed, std::size_t mc_permutations) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  const double observed = std::abs(coefficient(rx, ry));
  const double threshold = observed - 1e-12;
  if (x.size() <= 10) {
    std::vector<std::size_t> perm(ry.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> permuted(ry.size());
    std::size_t total = 0, extreme = 0;
    do {
      for (std::size_t i = 0; i < perm.size(); ++i) permuted[i] = ry[perm[i]];
      ++total;
      if (std::abs(coefficient(rx, permuted)) >= threshold) ++extreme;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(extreme) / static_cast<double>(total);
  }
  Rng rng(seed);
  std::size_t extreme = 0;
  for (std::size_t t = 0; t < mc_permutations; ++t) {
    rng.shuffle(std::span(ry));
    if (std::abs(coefficient(rx, ry)) >= threshold) ++extreme;
  }
  // Add-one estimator so the observed ordering counts.
  return static_cast<double>(extreme + 1) / static_cast<double>(mc_permutations + 1);
}

double frd_value(const CorrelationRecord& record, FrdField field) {
  return field == FrdField::kFsl ? record.frd_fsl : record.frd_test;
}

CorrelationResult correlate(std::span<const CorrelationRecord> records, FrdField field) {
  if (records.size() < 3) fail(ErrorCode::kSize, "correlation needs at least 3 records");
  std::vector<double> delta, frd;
  for (const auto& r : records) {
    delta.push_back(r.delta);
    frd.push_back(frd_value(r, field));
  }
  const Correlation p = pearson(delta, frd);
  const Correlation s = spearman(delta, frd);
  return {p.r, p.p, s.r, s.p, records.size()};
}

std::vector<CorrelationRecord> load_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open records " + path.string());
  std::vector<CorrelationRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      CorrelationRecord r;
      r.dataset = obj.at("dataset").get<std::string>();
      r.delta = obj.at("delta").get<double>();
      r.frd_fsl = obj.at("frd_fsl").get<double>();
      r.frd_test = obj.value("frd_test", r.frd_fsl);
      if (!std::isfinite(r.delta) || !std::isfinite(r.frd_fsl) || !std::isfinite(r.frd_test)) {
        fail(ErrorCode::kValidation, "non-finite record value");
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void save_records(std::span<const CorrelationRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write records " + path.string());
  for (const auto& r : records) {
    nlohmann::ordered_json obj;
    obj["dataset"] = r.dataset;
    obj["delta"] = r.delta;
    obj["frd_fsl"] = r.frd_fsl;
    obj["frd_test"] = r.frd_test;
    out << obj.dump() << '\n';
  }
}

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::kSize, "line fit needs two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) fail(ErrorCode::kDegenerate, "line fit with constant x");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace slicebench
