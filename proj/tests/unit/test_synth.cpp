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

#include <deque>

#include <gtest/gtest.h>

#include "slicebench/fmap.hpp"
#include "slicebench/ingest.hpp"
#include "slicebench/png_io.hpp"
#include "slicebench/synth.hpp"
#include "support.hpp"

namespace slicebench {
namespace {

using testing::code_of;
namespace fs = std::filesystem;

int count_components(const LabelMask& m) {
  const std::size_t h = m.labels.dim(0), w = m.labels.dim(1);
  std::vector<char> seen(h * w, 0);
  int n = 0;
  for (std::size_t start = 0; start < h * w; ++start) {
    if (seen[start] || m.labels.data()[start] == 0) continue;
    ++n;
    std::deque<std::size_t> q{start};
    seen[start] = 1;
    while (!q.empty()) {
      const std::size_t i = q.front();
      q.pop_front();
      const std::size_t y = i / w, x = i % w;
      const std::size_t nb[4] = {y > 0 ? i - w : i, y + 1 < h ? i + w : i, x > 0 ? i - 1 : i, x + 1 < w ? i + 1 : i};
      for (std::size_t j : nb) {
        if (!seen[j] && m.labels.data()[j] != 0) {
          seen[j] = 1;
          q.push_back(j);
        }
      }
    }
  }
  return n;
}

std::vector<fs::path> files_under(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root));
  std::sort(out.begin(), out.end());
  return out;
}

TEST(Synth, RunIsByteDeterministic) {
  testing::TempDir a("syntha"), b("synthb");
  SynthSpec spec;
  spec.seed = 11;
  spec.n_volumes = 2;
  spec.slices_per_volume = 4;
  spec.image_h = spec.image_w = 32;
  spec.write_dicom = true;
  spec.records = 6;
  run_synth(spec, a.path(), 1);
  run_synth(spec, b.path(), 3);
  const auto fa = files_under(a.path()), fb = files_under(b.path());
  ASSERT_EQ(fa, fb);
  EXPECT_GT(fa.size(), 20u);
  for (const auto& rel : fa) EXPECT_EQ(testing::read_bytes(a.path() / rel), testing::read_bytes(b.path() / rel)) << rel;
}

TEST(Synth, ObjectKindsAndMaskConsistency) {
  for (ObjectKind kind : {ObjectKind::kEllipse, ObjectKind::kTwoBlobs}) {
    SynthSpec spec;
    spec.object_kind = kind;
    spec.noise_sigma = 0.0;
    const auto vols = render_dataset(spec);
    ASSERT_EQ(vols.size(), spec.n_volumes);
    for (const auto& v : vols) {
      ASSERT_EQ(v.slices.size(), spec.slices_per_volume);
      for (const auto& s : v.slices) {
        ASSERT_TRUE(s.mask.is_binary());
        ASSERT_GT(s.mask.count_nonzero(), 0u);
        EXPECT_EQ(count_components(s.mask), kind == ObjectKind::kEllipse ? 1 : 2) << s.key.str();
        // Without noise the image has exactly two levels, split by the mask.
        float fg = -1, bg = -1;
        for (std::size_t i = 0; i < s.image.size(); ++i) {
          float& ref = s.mask.labels.data()[i] ? fg : bg;
          if (ref < 0) ref = s.image.data()[i];
          EXPECT_EQ(s.image.data()[i], ref);
          const float q = s.image.data()[i] * 255.0f;
          EXPECT_NEAR(q, std::round(q), 1e-3);
        }
        EXPECT_NE(fg, bg);
      }
    }
  }
}

TEST(Synth, ClassLabelsFollowArea) {
  SynthSpec spec;
  const auto vols = render_dataset(spec);
  std::vector<std::pair<std::size_t, int>> area_label;
  for (const auto& v : vols)
    for (const auto& s : v.slices) area_label.emplace_back(s.mask.count_nonzero(), s.class_label);
  std::vector<int> per(4, 0);
  for (const auto& [area, label] : area_label) ++per.at(static_cast<std::size_t>(label));
  for (int c : per) EXPECT_EQ(c, 8);
  for (const auto& a : area_label)
    for (const auto& b : area_label)
      if (a.first < b.first) EXPECT_LE(a.second, b.second);
}

TEST(Synth, FeatureMaps) {
  SynthSpec spec;
  spec.noise_sigma = 0;
  const auto s = render_dataset(spec)[0].slices[3];
  FeatureOptions opts;
  opts.mode = FeatureMode::kIntensityPositional;
  const FeatureMap f = make_feature_map(s.image, nullptr, opts, 0, "x");
  ASSERT_EQ(f.values.dims(), (Dims{16, 16, 4}));
  EXPECT_FLOAT_EQ(f.values(0, 0, 1), static_cast<float>(0.25 * 0.5 / 16));
  EXPECT_FLOAT_EQ(f.values(15, 3, 2), static_cast<float>(0.25 * 3.5 / 16));
  double sum = 0;
  for (std::size_t y = 8; y < 12; ++y)
    for (std::size_t x = 20; x < 24; ++x) sum += s.image(y, x);
  EXPECT_NEAR(f.values(2, 5, 0), sum / 16, 1e-6);
  EXPECT_EQ(f.encoder_id, "synth-intensity_positional");

  opts.mode = FeatureMode::kOneHotOracle;
  EXPECT_EQ(code_of([&] { make_feature_map(s.image, nullptr, opts, 0, "x"); }), ErrorCode::kValidation);
  const FeatureMap o = make_feature_map(s.image, &s.mask, opts, 0, "x");
  ASSERT_EQ(o.values.dim(2), 2u);
  for (std::size_t gy = 0; gy < 16; ++gy)
    for (std::size_t gx = 0; gx < 16; ++gx) EXPECT_EQ(o.values(gy, gx, 0) + o.values(gy, gx, 1), 1.0f);

  opts.mode = FeatureMode::kNoise;
  const FeatureMap n1 = make_feature_map(s.image, nullptr, opts, 4, "x");
  EXPECT_EQ(n1.values, make_feature_map(s.image, nullptr, opts, 4, "x").values);
  EXPECT_NE(n1.values, make_feature_map(s.image, nullptr, opts, 5, "x").values);
  opts.patch_size = 5;
  EXPECT_EQ(code_of([&] { make_feature_map(s.image, nullptr, opts, 0, "x"); }), ErrorCode::kDimension);
}

TEST(Synth, DicomSeriesCuratesAndDroppedSliceIsFlagged) {
  testing::TempDir dir("synthdcm");
  SynthSpec spec;
  spec.image_h = spec.image_w = 16;
  const auto vols = render_dataset(spec);
  make_dicom_series(spec, vols[0], dir / "full");
  const Volume v = parse_dicom_series(dir / "full");
  EXPECT_EQ(v.depth(), spec.slices_per_volume);
  EXPECT_EQ(v.series_id, vols[0].series_id);
  EXPECT_DOUBLE_EQ(v.spacing_mm[0], spec.slice_spacing_mm);
  for (std::size_t z = 0; z < v.depth(); ++z)
    for (std::size_t i = 0; i < 256; ++i)
      EXPECT_NEAR(v.voxels.data()[z * 256 + i], synth_scanner_value(vols[0].slices[z].image.data()[i]), 0.5);

  DicomOptions opts;
  opts.drop_slice = 3;
  make_dicom_series(spec, vols[0], dir / "drop", opts);
  const auto res = validate_continuity(parse_dicom_series(dir / "drop"));
  EXPECT_FALSE(res.accepted);
  EXPECT_EQ(res.slice_index, 3u);

  DicomOptions ref;
  ref.add_reference_slice = true;
  make_dicom_series(spec, vols[0], dir / "ref", ref);
  EXPECT_EQ(parse_dicom_series(dir / "ref").n_reference_slices, 1u);
}

TEST(Synth, SpecJson) {
  SynthSpec spec;
  spec.seed = 3;
  spec.image_h = 32;
  spec.image_w = 48;
  spec.object_kind = ObjectKind::kRamp;
  spec.drop_slice = 2;
  const SynthSpec back = parse_synth_spec(synth_spec_json(spec));
  EXPECT_EQ(back.seed, 3u);
  EXPECT_EQ(back.image_w, 48u);
  EXPECT_EQ(back.object_kind, ObjectKind::kRamp);
  EXPECT_EQ(back.drop_slice, 2u);
  EXPECT_EQ(synth_spec_json(back), synth_spec_json(spec));
  EXPECT_EQ(code_of([] { parse_synth_spec(R"({"seed": 1, "colour": 2})"); }), ErrorCode::kValidation);
  EXPECT_EQ(code_of([] { parse_synth_spec(R"({"image_size": [30, 32]})"); }), ErrorCode::kValidation);
  EXPECT_EQ(code_of([] { parse_synth_spec(R"({"seed": "x"})"); }), ErrorCode::kValidation);
  EXPECT_EQ(code_of([] { parse_synth_spec("{"); }), ErrorCode::kParse);
}

}  // namespace
}  // namespace slicebench
