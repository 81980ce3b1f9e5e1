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
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "slicebench/tensor.hpp"

namespace slicebench {

struct FrdConfig {
  int n_bins = 32;
  /// Diagonal loading added to every fitted covariance.
  double eps = 1e-6;
  /// z-score features with the reference set's mean and std before fitting.
  bool standardize = true;
  /// Nearest-neighbour resize {H, W} applied before feature extraction.
  std::optional<std::pair<std::size_t, std::size_t>> resize;

  void validate() const;
};

inline constexpr std::size_t kRadiomicFeatureCount = 34;

/// Bumped whenever any feature formula changes; golden vectors are keyed on it.
inline constexpr std::string_view kRadiomicsVersion = "rf34.1";

/// Feature order:
///   first order (16) mean, variance, skewness, kurtosis, min, max,
///                    p10, p25, p50, p75, p90, iqr, mad, entropy,
///                    uniformity, rms
///   texture (6)      GLCM contrast, dissimilarity, homogeneity, ASM,
///                    correlation, entropy; mean over offsets
///                    (0,1) (1,0) (1,1) (1,-1)
///   spatial (12)     intensity centroid y/x, central moments yy/xx/xy,
///                    gradient magnitude mean/variance, fraction above the
///                    Otsu threshold, 4-ring radial mean intensity profile
const std::array<std::string_view, kRadiomicFeatureCount>& radiomic_feature_names();

struct RadiomicVector {
  std::vector<float> values;  // kRadiomicFeatureCount entries
};

/// Features of a {H, W} image normalized to [0, 1]; H, W >= 2.
///
/// Conventions: population moments; skewness, kurtosis and GLCM correlation
/// are 0 when the variance is 0; percentiles interpolate linearly between
/// order statistics at rank p*(N-1); entropies use log2; intensities outside
/// [0, 1] are clamped only for quantization. First-order statistics are
/// accumulated over sorted values, which makes them exactly invariant to any
/// permutation of pixels.
RadiomicVector radiomic_features(const NdArray<float>& image, const FrdConfig& cfg);

/// Gray level per pixel: min(floor(v * n_bins), n_bins - 1), clamped to range.
NdArray<std::uint16_t> quantize(const NdArray<float>& image, int n_bins);

struct GlcmFeatures {
  double contrast = 0, dissimilarity = 0, homogeneity = 0, asm_ = 0, correlation = 0,
         entropy = 0;
};

/// Symmetric, normalized co-occurrence features for one (dy, dx) offset.
GlcmFeatures glcm_features(const NdArray<std::uint16_t>& levels, int n_bins, int dy, int dx);

NdArray<float> resize_nearest(const NdArray<float>& image, std::size_t out_h, std::size_t out_w);

}  // namespace slicebench
