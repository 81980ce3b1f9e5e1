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

#include "slicebench/zeroshot.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "slicebench/fmap.hpp"
#include "slicebench/metrics.hpp"
#include "slicebench/parallel.hpp"
#include "slicebench/png_io.hpp"
#include "slicebench/rng.hpp"

namespace slicebench {
namespace {

double sq_dist(const float* a, const float* b, std::size_t c) {
  double s = 0.0;
  for (std::size_t j = 0; j < c; ++j) {
    const double d = static_cast<double>(a[j]) - static_cast<double>(b[j]);
    s += d * d;
  }
  return s;
}

// Nearest centroid per point, lowest index on ties. Returns the inertia.
double assign(const NdArray<float>& points, const std::vector<float>& centroids, int k,
              std::vector<std::uint16_t>& out) {
  const std::size_t n = points.dim(0);
  const std::size_t c = points.dim(1);
  const float* x = points.data().data();
  double inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_j = 0;
    for (int j = 0; j < k; ++j) {
      const double d = sq_dist(x + i * c, centroids.data() + static_cast<std::size_t>(j) * c, c);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    out[i] = static_cast<std::uint16_t>(best_j);
    inertia += best;
  }
  return inertia;
}

std::vector<float> seed_plus_plus(const NdArray<float>& points, int k, Rng& rng) {
  const std::size_t n = points.dim(0);
  const std::size_t c = points.dim(1);
  const float* x = points.data().data();
  std::vector<float> centroids(static_cast<std::size_t>(k) * c);
  std::vector<bool> chosen(n, false);
  std::vector<double> d2(n);

  std::size_t first = static_cast<std::size_t>(rng.index(n));
  chosen[first] = true;
  std::copy_n(x + first * c, c, centroids.begin());
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(x + i * c, x + first * c, c);

  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum > r && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      if (pick == n) {  // rounding at the top end of the cumulative sum
        for (std::size_t i = n; i-- > 0;) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) free.push_back(i);
      }
      pick = free[static_cast<std::size_t>(rng.index(free.size()))];
    }
    chosen[pick] = true;
    std::copy_n(x + pick * c, c, centroids.begin() + static_cast<std::ptrdiff_t>(j * c));
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(x + i * c, x + pick * c, c));
    }
  }
  return centroids;
}

void update_centroids(const NdArray<float>& points, const std::vector<std::uint16_t>& labels,
                      int k, std::vector<float>& centroids) {
  const std::size_t n = points.dim(0);
  const std::size_t c = points.dim(1);
  const float* x = points.data().data();
  std::vector<double> sums(static_cast<std::size_t>(k) * c, 0.0);
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = labels[i];
    ++counts[j];
    for (std::size_t d = 0; d < c; ++d) sums[j * c + d] += x[i * c + d];
  }
  for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
    if (counts[j] == 0) continue;
    for (std::size_t d = 0; d < c; ++d) {
      centroids[j * c + d] =
          static_cast<float>(sums[j * c + d] / static_cast<double>(counts[j]));
    }
  }
  // Re-seed empty clusters from the worst-fitted points.
  std::vector<bool> taken(n, false);
  for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
    if (counts[j] != 0) continue;
    double worst = 0.0;
    std::size_t worst_i = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double d = sq_dist(x + i * c, centroids.data() + labels[i] * c, c);
      if (d > worst) {
        worst = d;
        worst_i = i;
      }
    }
    if (worst_i == n) continue;
    taken[worst_i] = true;
    std::copy_n(x + worst_i * c, c, centroids.begin() + static_cast<std::ptrdiff_t>(j * c));
  }
}

LabelMask binary_of(const LabelMask& labels, std::uint16_t id) {
  std::vector<std::uint16_t> out(labels.labels.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = labels.labels[i] == id ? 1 : 0;
  return LabelMask(NdArray<std::uint16_t>(labels.dims(), std::move(out)));
}

double choose(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

void ZeroShotConfig::validate() const {
  if (k < 1) fail(ErrorCode::kValidation, "k must be at least 1");
  if (k > 65535) fail(ErrorCode::kValidation, "k exceeds label range");
  if (max_iters < 1) fail(ErrorCode::kValidation, "max_iters must be at least 1");
}

Clustering kmeans(const NdArray<float>& points, const ZeroShotConfig& cfg) {
  cfg.validate();
  if (points.rank() != 2) fail(ErrorCode::kDimension, "points must be {n, c}");
  const std::size_t n = points.dim(0);
  const std::size_t c = points.dim(1);
  if (n < static_cast<std::size_t>(cfg.k)) {
    fail(ErrorCode::kSize, "k-means needs at least k points (n=" + std::to_string(n) +
                               ", k=" + std::to_string(cfg.k) + ")");
  }
  for (float v : points.data()) {
    if (!std::isfinite(v)) fail(ErrorCode::kValidation, "non-finite point coordinate");
  }

  Rng rng(cfg.seed);
  std::vector<float> centroids = seed_plus_plus(points, cfg.k, rng);
  std::vector<std::uint16_t> labels(n), next(n);

  Clustering out;
  double inertia = assign(points, centroids, cfg.k, labels);
  out.inertia_history.push_back(inertia);
  for (int it = 1; it <= cfg.max_iters; ++it) {
    update_centroids(points, labels, cfg.k, centroids);
    inertia = assign(points, centroids, cfg.k, next);
    out.inertia_history.push_back(inertia);
    out.iters_run = it;
    const bool fixpoint = next == labels;
    labels.swap(next);
    if (fixpoint) break;
  }
  out.assignments = NdArray<std::uint16_t>({n}, std::move(labels));
  out.centroids = NdArray<float>({static_cast<std::size_t>(cfg.k), c}, std::move(centroids));
  out.inertia = inertia;
  return out;
}

double clustering_inertia(const NdArray<float>& points, const Clustering& cl) {
  const std::size_t c = points.dim(1);
  double s = 0.0;
  for (std::size_t i = 0; i < points.dim(0); ++i) {
    s += sq_dist(points.data().data() + i * c,
                 cl.centroids.data().data() + cl.assignments[i] * c, c);
  }
  return s;
}

NdArray<float> features_to_points(const FeatureMap& map, GridIndex* index) {
  map.validate();
  if (index != nullptr) *index = {map.grid_h(), map.grid_w()};
  return NdArray<float>({map.grid_h() * map.grid_w(), map.channels()}, map.values.vec());
}

NdArray<float> pixels_to_points(const NdArray<float>& image, bool with_coords) {
  if (image.rank() != 2) fail(ErrorCode::kDimension, "image must be {H, W}");
  const std::size_t h = image.dim(0);
  const std::size_t w = image.dim(1);
  const std::size_t c = with_coords ? 3 : 1;
  std::vector<float> out(h * w * c);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      float* p = out.data() + (y * w + x) * c;
      p[0] = image(y, x);
      if (with_coords) {
        p[1] = static_cast<float>(static_cast<double>(y) / static_cast<double>(h));
        p[2] = static_cast<float>(static_cast<double>(x) / static_cast<double>(w));
      }
    }
  }
  return NdArray<float>({h * w, c}, std::move(out));
}

LabelMask labels_to_mask(const Clustering& clustering, std::size_t h, std::size_t w,
                         std::size_t out_h, std::size_t out_w) {
  if (clustering.assignments.size() != h * w) {
    fail(ErrorCode::kDimension, "clustering size does not match the label grid");
  }
  if (out_h < h || out_w < w) fail(ErrorCode::kDimension, "output smaller than label grid");
  NdArray<std::uint16_t> out({out_h, out_w});
  for (std::size_t y = 0; y < out_h; ++y) {
    const std::size_t gy = y * h / out_h;
    for (std::size_t x = 0; x < out_w; ++x) {
      out(y, x) = clustering.assignments[gy * w + x * w / out_w];
    }
  }
  return LabelMask(std::move(out));
}

ClusterChoice best_overlap_cluster(const LabelMask& cluster_labels, int k, const LabelMask& gt) {
  if (cluster_labels.dims() != gt.dims()) fail(ErrorCode::kDimension, "cluster/gt dims differ");
  if (gt.count_nonzero() == 0) fail(ErrorCode::kEmptyGroundTruth, "ground truth is empty");
  ClusterChoice best;
  for (int j = 0; j < k; ++j) {
    LabelMask m = binary_of(cluster_labels, static_cast<std::uint16_t>(j));
    const double score = dsc(m, gt);
    if (best.cluster_id < 0 || score > best.dsc) {
      best = {j, std::move(m), score};
    }
  }
  return best;
}

LabelMask majority_vote_mask(const LabelMask& cluster_labels, int k, const LabelMask& gt) {
  if (cluster_labels.dims() != gt.dims()) fail(ErrorCode::kDimension, "cluster/gt dims differ");
  std::vector<long> votes(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    const std::size_t j = cluster_labels.labels[i];
    if (j >= votes.size()) fail(ErrorCode::kLabel, "cluster label exceeds k");
    votes[j] += gt.labels[i] != 0 ? 1 : -1;
  }
  std::vector<std::uint16_t> out(gt.labels.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = votes[cluster_labels.labels[i]] > 0 ? 1 : 0;
  }
  return LabelMask(NdArray<std::uint16_t>(gt.dims(), std::move(out)));
}

int count_components_4(const LabelMask& mask) {
  if (mask.labels.rank() != 2) fail(ErrorCode::kDimension, "component count expects a 2D mask");
  const std::size_t h = mask.dims()[0];
  const std::size_t w = mask.dims()[1];
  std::vector<bool> seen(h * w, false);
  std::deque<std::size_t> queue;
  int components = 0;
  for (std::size_t start = 0; start < h * w; ++start) {
    if (mask.labels[start] == 0 || seen[start]) continue;
    ++components;
    seen[start] = true;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      const std::size_t y = i / w, x = i % w;
      auto visit = [&](std::size_t j) {
        if (mask.labels[j] != 0 && !seen[j]) {
          seen[j] = true;
          queue.push_back(j);
        }
      };
      if (y > 0) visit(i - w);
      if (y + 1 < h) visit(i + w);
      if (x > 0) visit(i - 1);
      if (x + 1 < w) visit(i + 1);
    }
  }
  return components;
}

bool select_single_object(const LabelMask& gt) { return count_components_4(gt) == 1; }

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) fail(ErrorCode::kDimension, "label vectors differ in length");
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  double index = 0, sum_a = 0, sum_b = 0;
  for (const auto& [k, v] : table) index += choose(v);
  for (const auto& [k, v] : rows) sum_a += choose(v);
  for (const auto& [k, v] : cols) sum_b += choose(v);
  const double expected = sum_a * sum_b / choose(static_cast<double>(a.size()));
  const double max_index = 0.5 * (sum_a + sum_b);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

LabelMask zeroshot_slice_mask(const ZeroShotInput& in, const ZeroShotConfig& cfg) {
  const Clustering cl = kmeans(in.points, cfg);
  const LabelMask labels =
      labels_to_mask(cl, in.grid_h, in.grid_w, in.gt.dims()[0], in.gt.dims()[1]);
  if (cfg.assign == AssignRule::kMajority) return majority_vote_mask(labels, cfg.k, in.gt);
  return best_overlap_cluster(labels, cfg.k, in.gt).mask;
}

double zeroshot_slice_dsc(const ZeroShotInput& in, const ZeroShotConfig& cfg) {
  return dsc(zeroshot_slice_mask(in, cfg), in.gt);
}

std::vector<ZeroShotRow> zeroshot_eval(const std::vector<ZeroShotInput>& slices,
                                       std::span<const int> ks, const ZeroShotConfig& cfg,
                                       std::size_t jobs) {
  std::vector<const ZeroShotInput*> eligible;
  for (const auto& s : slices) {
    if (select_single_object(s.gt)) eligible.push_back(&s);
  }
  if (eligible.empty()) fail(ErrorCode::kEmptySelection, "no single-object slices to evaluate");

  std::vector<ZeroShotRow> rows;
  for (int k : ks) {
    ZeroShotConfig c = cfg;
    c.k = k;
    std::vector<double> scores(eligible.size());
    parallel_for(eligible.size(), jobs,
                 [&](std::size_t i) { scores[i] = zeroshot_slice_dsc(*eligible[i], c); });
    const Summary s = summarize(scores);
    rows.push_back({k, eligible.size(), s.mean, s.std});
  }
  return rows;
}

std::vector<ZeroShotInput> load_zeroshot_inputs(const Manifest& features, const Manifest& gt,
                                                PointSource source) {
  std::map<SliceKey, const ManifestEntry*> gt_index;
  for (const auto& e : gt.entries) gt_index[e.key()] = &e;

  std::vector<ZeroShotInput> out;
  for (const auto& e : features.entries) {
    auto it = gt_index.find(e.key());
    if (it == gt_index.end() || !it->second->mask_path) continue;
    ZeroShotInput in;
    in.key = e.key();
    LabelMask mask = load_mask_png(gt.resolve(*it->second->mask_path));
    for (auto& v : mask.labels.data()) v = v != 0 ? 1 : 0;
    in.gt = std::move(mask);
    if (source == PointSource::kFeatures) {
      if (!e.feature_path) {
        fail(ErrorCode::kValidation, "entry " + e.key().str() + " has no feature_path");
      }
      const FeatureMap map = read_fmap(features.resolve(*e.feature_path));
      in.grid_h = map.grid_h();
      in.grid_w = map.grid_w();
      in.points = features_to_points(map);
    } else {
      const NdArray<float> image = load_image_unit(features.resolve(e.image_path));
      in.grid_h = image.dim(0);
      in.grid_w = image.dim(1);
      in.points = pixels_to_points(image, source == PointSource::kRawPixels);
    }
    if (in.gt.dims()[0] < in.grid_h || in.gt.dims()[1] < in.grid_w) {
      fail(ErrorCode::kDimension, "mask smaller than the feature grid for " + e.key().str());
    }
    out.push_back(std::move(in));
  }
  return out;
}

}  // namespace slicebench
