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

#include "slicebench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace slicebench {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_binary_pair(const LabelMask& pred, const LabelMask& gt) {
  if (pred.dims() != gt.dims()) {
    fail(ErrorCode::kDimension, "prediction and ground truth dims differ");
  }
  if (!pred.is_binary() || !gt.is_binary()) {
    fail(ErrorCode::kLabel, "masks must be binary (labels 0/1)");
  }
}

struct Shape3 {
  std::size_t d, h, w;
};

Shape3 as_volume(const Dims& dims) {
  if (dims.size() == 3) return {dims[0], dims[1], dims[2]};
  if (dims.size() == 2) return {1, dims[0], dims[1]};
  fail(ErrorCode::kDimension, "expected a 2D or 3D mask");
}

// Lower envelope of parabolas along one line (Felzenszwalb & Huttenlocher),
// with physical sample positions q * step. Infinite entries are not sites.
void distance_1d(std::vector<double>& line, double step, std::vector<int>& v,
                 std::vector<double>& z, std::vector<double>& out) {
  const int n = static_cast<int>(line.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (line[q] == kInf) continue;
    const double fq = line[q] + (q * step) * (q * step);
    double s = -kInf;
    while (k >= 0) {
      const int r = v[k];
      s = (fq - (line[r] + (r * step) * (r * step))) / (2.0 * step * (q - r));
      if (s <= z[k]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[k] = q;
    z[k] = (k == 0) ? -kInf : s;
    z[k + 1] = kInf;
  }
  if (k < 0) return;  // no sites: line stays infinite
  int j = 0;
  for (int p = 0; p < n; ++p) {
    while (z[j + 1] < p * step) ++j;
    const double delta = (p - v[j]) * step;
    out[p] = delta * delta + line[v[j]];
  }
  std::copy(out.begin(), out.end(), line.begin());
}

}  // namespace

double dsc(const LabelMask& pred, const LabelMask& gt) {
  require_binary_pair(pred, gt);
  std::size_t np = 0, ng = 0, both = 0;
  const auto p = pred.labels.data();
  const auto g = gt.labels.data();
  for (std::size_t i = 0; i < p.size(); ++i) {
    np += p[i];
    ng += g[i];
    both += p[i] & g[i];
  }
  if (np + ng == 0) return 1.0;
  return 2.0 * static_cast<double>(both) / static_cast<double>(np + ng);
}

double dsc2d_mean(const LabelMask& pred_vol, const LabelMask& gt_vol) {
  require_binary_pair(pred_vol, gt_vol);
  if (gt_vol.labels.rank() != 3) fail(ErrorCode::kDimension, "dsc2d_mean expects 3D masks");
  double sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t z = 0; z < gt_vol.dims()[0]; ++z) {
    LabelMask g = slice_of(gt_vol, z);
    if (g.count_nonzero() == 0) continue;
    sum += dsc(slice_of(pred_vol, z), g);
    ++counted;
  }
  if (counted == 0) fail(ErrorCode::kEmptyGroundTruth, "no slice with non-empty ground truth");
  return sum / static_cast<double>(counted);
}

std::vector<Voxel> surface_voxels(const LabelMask& mask) {
  if (!mask.is_binary()) fail(ErrorCode::kLabel, "surface_voxels expects a binary mask");
  const Shape3 s = as_volume(mask.dims());
  const auto data = mask.labels.data();
  auto at = [&](long z, long y, long x) -> bool {
    if (z < 0 || y < 0 || x < 0 || z >= static_cast<long>(s.d) ||
        y >= static_cast<long>(s.h) || x >= static_cast<long>(s.w)) {
      return false;
    }
    return data[(static_cast<std::size_t>(z) * s.h + static_cast<std::size_t>(y)) * s.w +
                static_cast<std::size_t>(x)] != 0;
  };
  std::vector<Voxel> out;
  for (long z = 0; z < static_cast<long>(s.d); ++z) {
    for (long y = 0; y < static_cast<long>(s.h); ++y) {
      for (long x = 0; x < static_cast<long>(s.w); ++x) {
        if (!at(z, y, x)) continue;
        if (!at(z - 1, y, x) || !at(z + 1, y, x) || !at(z, y - 1, x) || !at(z, y + 1, x) ||
            !at(z, y, x - 1) || !at(z, y, x + 1)) {
          out.push_back({static_cast<int>(z), static_cast<int>(y), static_cast<int>(x)});
        }
      }
    }
  }
  return out;
}

std::vector<double> squared_distance_transform(const Dims& dims, std::span<const Voxel> sites,
                                               const std::array<double, 3>& spacing) {
  const Shape3 s = as_volume(dims);
  std::vector<double> f(s.d * s.h * s.w, kInf);
  for (const Voxel& v : sites) {
    f[(static_cast<std::size_t>(v.z) * s.h + static_cast<std::size_t>(v.y)) * s.w +
      static_cast<std::size_t>(v.x)] = 0.0;
  }
  if (sites.empty()) return f;

  const std::size_t longest = std::max({s.d, s.h, s.w});
  std::vector<double> line, out(longest), z(longest + 1);
  std::vector<int> v(longest);
  auto pass = [&](std::size_t n, std::size_t stride, std::size_t outer_count,
                  auto base_of, double step) {
    line.resize(n);
    out.resize(n);
    for (std::size_t o = 0; o < outer_count; ++o) {
      const std::size_t base = base_of(o);
      for (std::size_t i = 0; i < n; ++i) line[i] = f[base + i * stride];
      distance_1d(line, step, v, z, out);
      for (std::size_t i = 0; i < n; ++i) f[base + i * stride] = line[i];
    }
  };
  // x lines, then y lines, then z lines.
  pass(s.w, 1, s.d * s.h, [&](std::size_t o) { return o * s.w; }, spacing[2]);
  pass(s.h, s.w, s.d * s.w,
       [&](std::size_t o) { return (o / s.w) * s.h * s.w + o % s.w; }, spacing[1]);
  pass(s.d, s.h * s.w, s.h * s.w, [&](std::size_t o) { return o; }, spacing[0]);
  return f;
}

double nsd(const LabelMask& pred, const LabelMask& gt, const NsdConfig& cfg) {
  require_binary_pair(pred, gt);
  if (cfg.tolerance < 0.0 || !std::isfinite(cfg.tolerance)) {
    fail(ErrorCode::kValidation, "NSD tolerance must be a non-negative number");
  }
  const auto sp = surface_voxels(pred);
  const auto sg = surface_voxels(gt);
  if (sp.empty() && sg.empty()) return 1.0;
  if (sp.empty() || sg.empty()) return 0.0;

  const std::array<double, 3> spacing = cfg.spacing.value_or(std::array<double, 3>{1, 1, 1});
  const Shape3 s = as_volume(pred.dims());
  const double tol2 = cfg.tolerance * cfg.tolerance;
  auto count_within = [&](const std::vector<Voxel>& from, const std::vector<Voxel>& to) {
    const auto dist2 = squared_distance_transform(pred.dims(), to, spacing);
    std::size_t hits = 0;
    for (const Voxel& v : from) {
      const std::size_t i = (static_cast<std::size_t>(v.z) * s.h + static_cast<std::size_t>(v.y)) * s.w +
                            static_cast<std::size_t>(v.x);
      if (dist2[i] <= tol2) ++hits;
    }
    return hits;
  };
  const std::size_t hits = count_within(sp, sg) + count_within(sg, sp);
  return static_cast<double>(hits) / static_cast<double>(sp.size() + sg.size());
}

double accuracy(std::span<const int> preds, std::span<const int> truth) {
  if (preds.size() != truth.size()) fail(ErrorCode::kDimension, "prediction/truth length mismatch");
  if (preds.empty()) fail(ErrorCode::kSize, "accuracy of zero samples");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0 || truth[i] < 0) fail(ErrorCode::kLabel, "negative class label");
    correct += preds[i] == truth[i];
  }
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth, int n_classes) {
  if (preds.size() != truth.size()) fail(ErrorCode::kDimension, "prediction/truth length mismatch");
  if (n_classes < 1) fail(ErrorCode::kValidation, "n_classes must be positive");
  ConfusionMatrix m(static_cast<std::size_t>(n_classes),
                    std::vector<std::size_t>(static_cast<std::size_t>(n_classes), 0));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] < 0 || preds[i] >= n_classes || truth[i] < 0 || truth[i] >= n_classes) {
      fail(ErrorCode::kLabel, "class label out of range");
    }
    ++m[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(preds[i])];
  }
  return m;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(s.n - 1));
  s.std_defined = true;
  return s;
}

CaseMetrics evaluate_case(const std::string& case_id, const LabelMask& pred_vol,
                          const LabelMask& gt_vol, const NsdConfig& cfg) {
  CaseMetrics c;
  c.case_id = case_id;
  c.dsc3d = dsc(pred_vol, gt_vol);
  c.nsd3d = nsd(pred_vol, gt_vol, cfg);
  if (gt_vol.labels.rank() == 3 && gt_vol.count_nonzero() > 0) {
    c.dsc2d_mean = dsc2d_mean(pred_vol, gt_vol);
  }
  return c;
}

MetricReport build_report(std::vector<CaseMetrics> cases) {
  std::sort(cases.begin(), cases.end(),
            [](const CaseMetrics& a, const CaseMetrics& b) { return a.case_id < b.case_id; });
  std::vector<double> d2, d3, n3;
  for (const auto& c : cases) {
    if (c.dsc2d_mean) d2.push_back(*c.dsc2d_mean);
    d3.push_back(c.dsc3d);
    n3.push_back(c.nsd3d);
  }
  MetricReport r;
  r.per_case = std::move(cases);
  r.dsc2d = summarize(d2);
  r.dsc3d = summarize(d3);
  r.nsd3d = summarize(n3);
  return r;
}

}  // namespace slicebench
