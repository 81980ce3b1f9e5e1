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

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "slicebench/manifest.hpp"
#include "slicebench/tensor.hpp"

namespace slicebench {

enum class PointSource {
  kFeatures,      // patch embeddings from a feature map
  kRawPixels,     // per-pixel (intensity, y/H, x/W)
  kRawIntensity,  // per-pixel intensity only
};

enum class AssignRule {
  kBestOverlap,  // single cluster with the highest DSC against the target
  kMajority,     // union of clusters whose pixels are mostly foreground
};

struct ZeroShotConfig {
  int k = 8;
  std::uint64_t seed = 0;
  int max_iters = 300;
  PointSource source = PointSource::kFeatures;
  AssignRule assign = AssignRule::kBestOverlap;

  void validate() const;
};

struct Clustering {
  NdArray<std::uint16_t> assignments;  // {n}
  NdArray<float> centroids;            // {k, c}
  double inertia = 0.0;
  int iters_run = 0;
  /// Inertia after the seeding assignment and after every Lloyd iteration.
  std::vector<double> inertia_history;
};

/// Lloyd's algorithm from k-means++ seeding on points {n, c}. Stops at an
/// assignment fixpoint or after max_iters. An empty cluster takes the point
/// farthest from its assigned centroid; when every point sits on its
/// centroid the empty cluster is left in place.
Clustering kmeans(const NdArray<float>& points, const ZeroShotConfig& cfg);

/// Sum of squared distances of points to their assigned centroids.
double clustering_inertia(const NdArray<float>& points, const Clustering& c);

/// Row-major mapping between point indices and patch-grid positions.
struct GridIndex {
  std::size_t h = 0;
  std::size_t w = 0;
  std::pair<std::size_t, std::size_t> to_grid(std::size_t point) const {
    return {point / w, point % w};
  }
  std::size_t to_point(std::size_t y, std::size_t x) const { return y * w + x; }
};

/// {h, w, c} feature map to points {h*w, c}.
NdArray<float> features_to_points(const FeatureMap& map, GridIndex* index = nullptr);

/// {H, W} image to per-pixel points; with_coords appends (y/H, x/W).
NdArray<float> pixels_to_points(const NdArray<float>& image, bool with_coords);

/// Nearest-neighbour upsampling of an h×w label grid to H×W.
LabelMask labels_to_mask(const Clustering& clustering, std::size_t h, std::size_t w,
                         std::size_t out_h, std::size_t out_w);

struct ClusterChoice {
  int cluster_id = -1;
  LabelMask mask;
  double dsc = 0.0;
};

/// Cluster whose binary mask has the highest DSC against gt; lowest id wins
/// ties. Throws kEmptyGroundTruth for an empty gt.
ClusterChoice best_overlap_cluster(const LabelMask& cluster_labels, int k, const LabelMask& gt);

/// Union of clusters whose pixels are strictly mostly foreground in gt.
LabelMask majority_vote_mask(const LabelMask& cluster_labels, int k, const LabelMask& gt);

int count_components_4(const LabelMask& mask);

/// True iff the binary mask has exactly one 4-connected foreground component.
bool select_single_object(const LabelMask& gt);

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// One slice ready for zero-shot evaluation.
struct ZeroShotInput {
  SliceKey key;
  NdArray<float> points;  // {grid_h*grid_w, c}
  std::size_t grid_h = 0;
  std::size_t grid_w = 0;
  LabelMask gt;  // binary {H, W}
};

struct ZeroShotRow {
  int k = 0;
  std::size_t n_slices = 0;
  double mean_dsc = 0.0;
  double std_dsc = 0.0;
};

/// Segments one slice: cluster, upsample, assign.
LabelMask zeroshot_slice_mask(const ZeroShotInput& input, const ZeroShotConfig& cfg);

/// DSC of zeroshot_slice_mask against gt.
double zeroshot_slice_dsc(const ZeroShotInput& input, const ZeroShotConfig& cfg);

/// Per-k mean 2D DSC over the single-object slices. Throws kEmptySelection
/// when no slice qualifies.
std::vector<ZeroShotRow> zeroshot_eval(const std::vector<ZeroShotInput>& slices,
                                       std::span<const int> ks, const ZeroShotConfig& cfg,
                                       std::size_t jobs = 1);

/// Joins a feature (or image) manifest with a ground-truth mask manifest on
/// the slice key and builds the points for `source`. Masks are binarized.
std::vector<ZeroShotInput> load_zeroshot_inputs(const Manifest& features, const Manifest& gt,
                                                PointSource source);

}  // namespace slicebench
