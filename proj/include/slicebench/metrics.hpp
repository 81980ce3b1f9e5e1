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

#include <array>
#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slicebench/tensor.hpp"

namespace slicebench {

/// 2|P∩G| / (|P|+|G|) over binary masks of any rank. Two empty masks score
/// 1.0, exactly one empty mask scores 0.0.
double dsc(const LabelMask& pred, const LabelMask& gt);

/// Mean per-slice DSC over the slices of a {D,H,W} pair whose ground truth is
/// non-empty. Throws kEmptyGroundTruth when no such slice exists.
double dsc2d_mean(const LabelMask& pred_vol, const LabelMask& gt_vol);

struct Voxel {
  int z = 0;
  int y = 0;
  int x = 0;
  auto operator<=>(const Voxel&) const = default;
};

/// Foreground voxels with a 6-neighbour that is background or outside the
/// array, in (z, y, x) order. A 2D mask is treated as a single slice.
std::vector<Voxel> surface_voxels(const LabelMask& mask);

struct NsdConfig {
  /// Surface tolerance. Voxel units, or millimetres when spacing is set.
  double tolerance = 1.0;
  /// Voxel size (dz, dy, dx); distances are scaled by it when present.
  std::optional<std::array<double, 3>> spacing;
};

/// Normalized surface Dice with exact Euclidean surface distances computed
/// through a separable squared distance transform.
double nsd(const LabelMask& pred, const LabelMask& gt, const NsdConfig& cfg = {});

/// Squared Euclidean distance from every voxel to the nearest voxel of
/// `sites` (dims {D,H,W}); +inf everywhere when `sites` is empty.
std::vector<double> squared_distance_transform(const Dims& dims,
                                               std::span<const Voxel> sites,
                                               const std::array<double, 3>& spacing);

double accuracy(std::span<const int> preds, std::span<const int> truth);

/// confusion[i][j] counts samples with truth i predicted as j.
using ConfusionMatrix = std::vector<std::vector<std::size_t>>;
ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> truth,
                          int n_classes);

/// Mean and sample standard deviation. With a single value the deviation is
/// reported as 0 and `std_defined` is false.
struct Summary {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
  bool std_defined = false;
};
Summary summarize(std::span<const double> values);

struct CaseMetrics {
  std::string case_id;
  std::optional<double> dsc2d_mean;  // unset when the case has no GT slice
  double dsc3d = 0.0;
  double nsd3d = 0.0;
};

struct MetricReport {
  std::vector<CaseMetrics> per_case;
  Summary dsc2d;
  Summary dsc3d;
  Summary nsd3d;
};

CaseMetrics evaluate_case(const std::string& case_id, const LabelMask& pred_vol,
                          const LabelMask& gt_vol, const NsdConfig& cfg);

/// Sorts cases by id and recomputes the aggregates.
MetricReport build_report(std::vector<CaseMetrics> cases);

}  // namespace slicebench
