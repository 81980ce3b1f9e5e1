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

#include <cmath>
#include <cstring>
#include <set>

#include <gtest/gtest.h>

#include "slicebench/metrics.hpp"
#include "slicebench/rng.hpp"
#include "slicebench/synth.hpp"
#include "slicebench/zeroshot.hpp"
#include "support.hpp"

namespace slicebench {
namespace {

using testing::code_of;

LabelMask mask2d(std::size_t h, std::size_t w, std::vector<std::uint16_t> v) {
  return LabelMask(NdArray<std::uint16_t>({h, w}, std::move(v)));
}

TEST(Kmeans, DistinctPointsWithKEqualN) {
  NdArray<float> pts({5, 2}, {0, 0, 1, 0, 0, 3, 7, 7, -2, 5});
  ZeroShotConfig cfg;
  cfg.k = 5;
  const Clustering c = kmeans(pts, cfg);
  EXPECT_EQ(c.inertia, 0.0);
  std::set<std::uint16_t> ids(c.assignments.data().begin(), c.assignments.data().end());
  EXPECT_EQ(ids.size(), 5u);
}

TEST(Kmeans, SingleClusterIsTheMean) {
  Rng rng(2);
  NdArray<float> pts({50, 3});
  for (auto& v : pts.data()) v = static_cast<float>(rng.normal(1.0, 2.0));
  ZeroShotConfig cfg;
  cfg.k = 1;
  const Clustering c = kmeans(pts, cfg);
  for (std::size_t j = 0; j < 3; ++j) {
    double m = 0;
    for (std::size_t i = 0; i < 50; ++i) m += pts(i, j);
    EXPECT_NEAR(c.centroids(0, j), m / 50, 1e-5);
  }
}

TEST(Kmeans, InvariantsOnRandomData) {
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 20 + rng.index(200), dim = 1 + rng.index(5);
    NdArray<float> pts({n, dim});
    for (auto& v : pts.data()) v = static_cast<float>(rng.normal());
    ZeroShotConfig cfg;
    cfg.k = 1 + static_cast<int>(rng.index(12));
    cfg.seed = rng.next_u64();
    const Clustering a = kmeans(pts, cfg);
    const Clustering b = kmeans(pts, cfg);
    EXPECT_EQ(a.assignments, b.assignments);
    EXPECT_EQ(std::memcmp(a.centroids.data().data(), b.centroids.data().data(),
                          a.centroids.size() * sizeof(float)),
              0);
    for (std::size_t i = 0; i < n; ++i) EXPECT_LT(a.assignments[i], cfg.k);
    EXPECT_NEAR(a.inertia, clustering_inertia(pts, a), 1e-9 * (1 + a.inertia));
    for (std::size_t i = 1; i < a.inertia_history.size(); ++i) {
      EXPECT_LE(a.inertia_history[i], a.inertia_history[i - 1] * (1 + 1e-12));
    }
  }
}

TEST(Kmeans, Errors) {
  ZeroShotConfig cfg;
  cfg.k = 4;
  EXPECT_EQ(code_of([&] { kmeans(NdArray<float>({3, 2}), cfg); }), ErrorCode::kSize);
  NdArray<float> bad({5, 1}, 0.0f);
  bad[2] = std::nanf("");
  cfg.k = 2;
  EXPECT_EQ(code_of([&] { kmeans(bad, cfg); }), ErrorCode::kValidation);
  cfg.k = 0;
  EXPECT_EQ(code_of([&] { kmeans(NdArray<float>({5, 1}), cfg); }), ErrorCode::kValidation);
}

TEST(Kmeans, ThreeBlobsRecovered) {
  Rng rng(5);
  std::vector<int> labels;
  const auto pts = testing::gaussian_blobs(rng, {{0, 0}, {10, 0}, {0, 10}}, 60, 0.5, &labels);
  ZeroShotConfig cfg;
  cfg.k = 3;
  const Clustering c = kmeans(pts, cfg);
  std::vector<int> got(c.assignments.data().begin(), c.assignments.data().end());
  EXPECT_EQ(adjusted_rand_index(got, labels), 1.0);
}

TEST(Ari, HandValues) {
  const std::vector<int> a{0, 0, 1, 1}, b{1, 1, 0, 0}, c{0, 1, 0, 1};
  EXPECT_EQ(adjusted_rand_index(a, b), 1.0);
  // Contingency all ones: index 0, expected (2*2)/6, max 2.
  EXPECT_NEAR(adjusted_rand_index(a, c), (0 - 4.0 / 6) / (2 - 4.0 / 6), 1e-15);
}

TEST(Points, RowMajorFlattening) {
  FeatureMap m{NdArray<float>({2, 2, 1}, {0, 1, 2, 3}), "", ""};
  GridIndex idx;
  const auto p = features_to_points(m, &idx);
  EXPECT_EQ(p.dims(), (Dims{4, 1}));
  for (int i = 0; i < 4; ++i) EXPECT_EQ(p[i], static_cast<float>(i));
  EXPECT_EQ(idx.to_grid(2), (std::pair<std::size_t, std::size_t>{1, 0}));
  EXPECT_EQ(features_to_points({NdArray<float>({1, 1, 3}, 2.0f), "", ""}).dims(), (Dims{1, 3}));

  Rng rng(1);
  FeatureMap r{NdArray<float>({3, 5, 2}), "", ""};
  for (auto& v : r.values.data()) v = static_cast<float>(rng.normal());
  const auto rp = features_to_points(r, &idx);
  for (std::size_t y = 0; y < 3; ++y)
    for (std::size_t x = 0; x < 5; ++x) {
      const std::size_t i = idx.to_point(y, x);
      EXPECT_EQ(idx.to_grid(i), (std::pair<std::size_t, std::size_t>{y, x}));
      EXPECT_EQ(rp(i, 1), r.values(y, x, 1));
    }
}

TEST(Points, PixelsWithCoordinates) {
  NdArray<float> img({2, 4}, {0, .1f, .2f, .3f, .4f, .5f, .6f, .7f});
  const auto p = pixels_to_points(img, true);
  EXPECT_EQ(p.dims(), (Dims{8, 3}));
  EXPECT_FLOAT_EQ(p(6, 0), .6f);
  EXPECT_FLOAT_EQ(p(6, 1), 0.5f);
  EXPECT_FLOAT_EQ(p(6, 2), 0.5f);
  EXPECT_EQ(pixels_to_points(img, false).dims(), (Dims{8, 1}));
}

Clustering grid_clustering(std::vector<std::uint16_t> a) {
  Clustering c;
  const std::size_t n = a.size();
  c.assignments = NdArray<std::uint16_t>({n}, std::move(a));
  return c;
}

TEST(Upsample, IdentityBlocksAndOracle) {
  const auto c = grid_clustering({0, 1, 2, 3});
  EXPECT_EQ(labels_to_mask(c, 2, 2, 2, 2).labels, NdArray<std::uint16_t>({2, 2}, {0, 1, 2, 3}));
  const auto up = labels_to_mask(c, 2, 2, 4, 4);
  EXPECT_EQ(up.labels, NdArray<std::uint16_t>({4, 4}, {0, 0, 1, 1, 0, 0, 1, 1, 2, 2, 3, 3, 2, 2, 3, 3}));
  EXPECT_EQ(code_of([&] { labels_to_mask(c, 3, 2, 6, 6); }), ErrorCode::kDimension);
  EXPECT_EQ(code_of([&] { labels_to_mask(c, 2, 2, 1, 4); }), ErrorCode::kDimension);

  Rng rng(3);
  std::vector<std::uint16_t> a(3 * 5);
  for (auto& v : a) v = static_cast<std::uint16_t>(rng.index(6));
  const auto m = labels_to_mask(grid_clustering(a), 3, 5, 13, 17);
  for (std::size_t y = 0; y < 13; ++y)
    for (std::size_t x = 0; x < 17; ++x) EXPECT_EQ(m.labels(y, x), a[(y * 3 / 13) * 5 + x * 5 / 17]);
}

TEST(Assign, BestOverlap) {
  const auto gt = mask2d(2, 3, {1, 1, 0, 1, 0, 0});
  const auto exact = mask2d(2, 3, {2, 2, 0, 2, 1, 1});
  const auto pick = best_overlap_cluster(exact, 3, gt);
  EXPECT_EQ(pick.cluster_id, 2);
  EXPECT_EQ(pick.dsc, 1.0);
  EXPECT_EQ(pick.mask, gt);
  EXPECT_EQ(code_of([&] { best_overlap_cluster(exact, 3, mask2d(2, 3, {0, 0, 0, 0, 0, 0})); }),
            ErrorCode::kEmptyGroundTruth);
  // Two clusters with equal DSC: the lower id wins.
  const auto tie = mask2d(1, 4, {0, 1, 0, 1});
  EXPECT_EQ(best_overlap_cluster(tie, 2, mask2d(1, 4, {1, 0, 1, 0})).cluster_id, 0);
}

TEST(Assign, BestOverlapMatchesExhaustiveOracle) {
  Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    const int k = 2 + static_cast<int>(rng.index(6));
    NdArray<std::uint16_t> labels({8, 8}), gtv({8, 8});
    for (auto& v : labels.data()) v = static_cast<std::uint16_t>(rng.index(k));
    for (auto& v : gtv.data()) v = rng.uniform() < 0.4;
    gtv[0] = 1;
    const LabelMask cl(labels), gt(gtv);
    const auto pick = best_overlap_cluster(cl, k, gt);
    for (int j = 0; j < k; ++j) {
      LabelMask m(NdArray<std::uint16_t>({8, 8}));
      for (std::size_t i = 0; i < 64; ++i) m.labels[i] = labels[i] == j;
      const double d = testing::count_dsc(m, gt);
      EXPECT_GE(pick.dsc, d);
      if (j < pick.cluster_id) EXPECT_LT(d, pick.dsc);
    }
  }
}

TEST(Assign, MajorityVote) {
  const auto gt = mask2d(1, 6, {1, 1, 0, 1, 0, 0});
  const auto cl = mask2d(1, 6, {0, 0, 1, 1, 1, 2});
  // Cluster 0 is all foreground, cluster 1 one of three, cluster 2 none.
  EXPECT_EQ(majority_vote_mask(cl, 3, gt), mask2d(1, 6, {1, 1, 0, 0, 0, 0}));
}

TEST(SingleObject, FourConnectivity) {
  EXPECT_TRUE(select_single_object(mask2d(3, 3, {0, 1, 0, 1, 1, 1, 0, 1, 0})));
  EXPECT_FALSE(select_single_object(mask2d(3, 3, {1, 0, 0, 0, 0, 0, 0, 0, 1})));
  // Diagonal neighbours do not connect.
  EXPECT_FALSE(select_single_object(mask2d(2, 2, {1, 0, 0, 1})));
  EXPECT_TRUE(select_single_object(mask2d(2, 3, {1, 1, 0, 0, 0, 0})));
  EXPECT_FALSE(select_single_object(mask2d(2, 2, {0, 0, 0, 0})));
}

ZeroShotInput onehot_input(const LabelMask& gt) {
  ZeroShotInput in;
  in.gt = gt;
  in.grid_h = gt.dims()[0];
  in.grid_w = gt.dims()[1];
  FeatureOptions o;
  o.mode = FeatureMode::kOneHotOracle;
  o.patch_size = 1;
  NdArray<float> img(gt.dims(), 0.0f);
  in.points = features_to_points(make_feature_map(img, &gt, o, 0, "x"));
  return in;
}

TEST(Eval, OracleFeaturesSolveEveryK) {
  SynthSpec spec;
  spec.image_h = spec.image_w = 32;
  spec.n_volumes = 2;
  spec.slices_per_volume = 3;
  std::vector<ZeroShotInput> inputs;
  for (const auto& v : render_dataset(spec))
    for (const auto& s : v.slices) inputs.push_back(onehot_input(s.mask));
  const std::vector<int> ks{2, 4, 8};
  const auto rows = zeroshot_eval(inputs, ks, {}, 2);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.mean_dsc, 1.0);
    EXPECT_EQ(r.n_slices, inputs.size());
  }
}

TEST(Eval, SkipsMultiObjectSlicesAndRejectsEmptySelection) {
  const auto two = mask2d(4, 4, {1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1});
  const auto one = mask2d(4, 4, {1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  const std::vector<int> ks{2};
  EXPECT_EQ(code_of([&] { zeroshot_eval({onehot_input(two)}, ks, {}); }), ErrorCode::kEmptySelection);
  const auto rows = zeroshot_eval({onehot_input(two), onehot_input(one)}, ks, {});
  EXPECT_EQ(rows[0].n_slices, 1u);
  const auto& r = rows[0];
  EXPECT_GE(r.mean_dsc, 0.0);
  EXPECT_LE(r.mean_dsc, 1.0);
}

TEST(Eval, ParallelMatchesSerial) {
  SynthSpec spec;
  spec.image_h = spec.image_w = 32;
  spec.n_volumes = 2;
  spec.slices_per_volume = 4;
  std::vector<ZeroShotInput> inputs;
  for (const auto& v : render_dataset(spec))
    for (const auto& s : v.slices) {
      ZeroShotInput in;
      in.gt = s.mask;
      in.grid_h = in.grid_w = 32;
      in.points = pixels_to_points(s.image, true);
      inputs.push_back(std::move(in));
    }
  const std::vector<int> ks{4, 8};
  const auto a = zeroshot_eval(inputs, ks, {}, 1);
  const auto b = zeroshot_eval(inputs, ks, {}, 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].mean_dsc, b[i].mean_dsc);
    EXPECT_EQ(a[i].std_dsc, b[i].std_dsc);
  }
}

}  // namespace
}  // namespace slicebench
