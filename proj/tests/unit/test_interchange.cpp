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
#include <fstream>
#include <limits>
#include <set>

#include <gtest/gtest.h>

#include "slicebench/error.hpp"
#include "slicebench/fmap.hpp"
#include "slicebench/manifest.hpp"
#include "slicebench/png_io.hpp"
#include "slicebench/rng.hpp"
#include "support.hpp"

namespace slicebench {
namespace {

using testing::TempDir;
using testing::code_of;
using testing::golden_dir;
using testing::read_bytes;

FeatureMap known_map() {
  std::vector<float> v;
  for (int i = 0; i < 12; ++i) v.push_back(static_cast<float>((i - 5) * 0.25));
  return {NdArray<float>({2, 2, 3}, v), "P1/S1/0", "enc"};
}

TEST(Tensor, RejectsZeroDimensionAndBadRank) {
  EXPECT_EQ(code_of([] { NdArray<float>({2, 0}); }), ErrorCode::kDimension);
  EXPECT_EQ(code_of([] { NdArray<float>({1, 1, 1, 1, 1}); }), ErrorCode::kDimension);
  EXPECT_EQ(code_of([] { NdArray<float>({2, 2}, std::vector<float>(3)); }), ErrorCode::kDimension);
}

TEST(Tensor, LabelNamesAreEnforced) {
  LabelMask m(NdArray<std::uint16_t>({2, 2}, {0, 1, 2, 1}));
  m.label_names = {{0, "bg"}, {1, "fg"}};
  EXPECT_EQ(code_of([&] { m.validate(); }), ErrorCode::kLabel);
  m.label_names[2] = "other";
  EXPECT_NO_THROW(m.validate());
}

TEST(Fmap, HeaderIs24BytesForRank3) {
  EXPECT_EQ(fmap_header_size(3), 4u + 1 + 1 + 2 + 4 + 3 * 4);
  const auto bytes = encode_tensor(known_map().values);
  EXPECT_EQ(bytes.size(), 24u + 12 * 4);
}

TEST(Fmap, UnitMapWithZeroValue) {
  FeatureMap m{NdArray<float>({1, 1, 1}, 0.0f), "s", "e"};
  const auto b = encode_tensor(m.values);
  ASSERT_EQ(b.size(), 24u + 4);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(b[12 + 4 * i], 1);
    EXPECT_EQ(b[13 + 4 * i] | b[14 + 4 * i] | b[15 + 4 * i], 0);
  }
  for (int i = 24; i < 28; ++i) EXPECT_EQ(b[i], 0);
}

// Golden files were written by a separate byte-level writer, so these
// comparisons pin the layout and the little-endian encoding.
TEST(Fmap, MatchesGoldenFloatFile) {
  EXPECT_EQ(encode_tensor(known_map().values), read_bytes(golden_dir() / "fmap_2x2x3_f32.fmap"));
  const Tensor t = read_tensor(golden_dir() / "fmap_2x2x3_f32.fmap");
  EXPECT_EQ(std::get<NdArray<float>>(t), known_map().values);
}

TEST(Fmap, MatchesGoldenUint16File) {
  NdArray<std::uint16_t> a({2, 3}, {0, 1, 255, 256, 4660, 65535});
  EXPECT_EQ(encode_tensor(a), read_bytes(golden_dir() / "tensor_2x3_u16.fmap"));
  EXPECT_EQ(std::get<NdArray<std::uint16_t>>(read_tensor(golden_dir() / "tensor_2x3_u16.fmap")), a);
}

TEST(Fmap, RoundTripIsBitwise) {
  TempDir dir("fmap");
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t h = 1 + rng.index(5), w = 1 + rng.index(5), c = 1 + rng.index(7);
    NdArray<float> v({h, w, c});
    for (auto& x : v.data()) x = static_cast<float>(rng.normal() * 1e3);
    v[0] = -0.0f;
    v[v.size() - 1] = std::numeric_limits<float>::denorm_min();
    FeatureMap m{v, "ref" + std::to_string(trial), "enc-x"};
    write_fmap(m, dir / "m.fmap");
    const FeatureMap back = read_fmap(dir / "m.fmap");
    EXPECT_EQ(back, m);
    EXPECT_EQ(std::memcmp(back.values.data().data(), m.values.data().data(), 4 * v.size()), 0);
  }
}

TEST(Fmap, SidecarCarriesMetadata) {
  TempDir dir("fmap");
  write_fmap(known_map(), dir / "a.fmap");
  const auto text = testing::read_text(sidecar_path(dir / "a.fmap"));
  EXPECT_NE(text.find("\"slice_ref\": \"P1/S1/0\""), std::string::npos);
  EXPECT_NE(text.find("\"encoder_id\": \"enc\""), std::string::npos);
  EXPECT_NE(text.find("\"channels\": 3"), std::string::npos);
}

TEST(Fmap, Negatives) {
  auto good = encode_tensor(known_map().values);
  auto bad_magic = good;
  std::memcpy(bad_magic.data(), "XXXX", 4);
  EXPECT_EQ(code_of([&] { decode_tensor(bad_magic); }), ErrorCode::kFormat);
  auto bad_version = good;
  bad_version[4] = 2;
  EXPECT_EQ(code_of([&] { decode_tensor(bad_version); }), ErrorCode::kFormat);
  auto truncated = good;
  truncated.pop_back();
  EXPECT_EQ(code_of([&] { decode_tensor(truncated); }), ErrorCode::kLength);
  auto header_only = std::vector<std::uint8_t>(good.begin(), good.begin() + 14);
  EXPECT_EQ(code_of([&] { decode_tensor(header_only); }), ErrorCode::kLength);

  FeatureMap nan_map = known_map();
  nan_map.values[3] = std::numeric_limits<float>::quiet_NaN();
  TempDir dir("fmap");
  EXPECT_EQ(code_of([&] { write_fmap(nan_map, dir / "n.fmap"); }), ErrorCode::kValidation);
  EXPECT_EQ(code_of([&] { write_fmap(known_map(), dir / "missing" / "x.fmap"); }), ErrorCode::kIo);
}

TEST(Png, MaskRoundTrips) {
  TempDir dir("png");
  LabelMask zeros(NdArray<std::uint16_t>({4, 4}, 0));
  save_mask_png(zeros, dir / "z.png");
  EXPECT_EQ(load_mask_png(dir / "z.png"), zeros);

  LabelMask three(NdArray<std::uint16_t>({3, 5}, {0, 1, 2, 2, 1, 0, 0, 0, 1, 2, 2, 2, 1, 0, 0}));
  save_mask_png(three, dir / "t.png");
  const LabelMask back = load_mask_png(dir / "t.png");
  EXPECT_EQ(back.labels, three.labels);
  std::set<std::uint16_t> labels(back.labels.data().begin(), back.labels.data().end());
  EXPECT_EQ(labels, (std::set<std::uint16_t>{0, 1, 2}));
}

TEST(Png, ReadsForeignGrayscaleVerbatim) {
  const auto img = load_gray_png(golden_dir() / "gray8_3x2.png");
  EXPECT_EQ(img, NdArray<std::uint8_t>({2, 3}, {0, 1, 2, 3, 128, 255}));
  const auto unit = load_image_unit(golden_dir() / "gray8_3x2.png");
  EXPECT_FLOAT_EQ(unit[4], 128.0f / 255.0f);
}

TEST(Png, RejectsColourAndDeepImages) {
  EXPECT_EQ(code_of([] { load_mask_png(golden_dir() / "rgb_2x2.png"); }), ErrorCode::kFormat);
  EXPECT_EQ(code_of([] { load_mask_png(golden_dir() / "gray16_2x2.png"); }), ErrorCode::kFormat);
  TempDir dir("png");
  {
    std::ofstream(dir / "junk.png") << "not a png at all, not at all";
  }
  EXPECT_EQ(code_of([&] { load_gray_png(dir / "junk.png"); }), ErrorCode::kFormat);
  LabelMask big(NdArray<std::uint16_t>({1, 2}, {0, 300}));
  EXPECT_EQ(code_of([&] { save_mask_png(big, dir / "b.png"); }), ErrorCode::kLabel);
}

TEST(Manifest, RoundTripAndDuplicateRejection) {
  TempDir dir("manifest");
  Manifest m;
  m.dataset_name = "demo";
  ManifestEntry a;
  a.patient_id = "P1";
  a.series_id = "S1";
  a.slice_index = 0;
  a.image_path = "images/a.png";
  a.mask_path = "masks/a.png";
  a.class_label = "2";
  a.attributes["Modality"] = "MR";
  ManifestEntry b = a;
  b.slice_index = 1;
  b.mask_path.reset();
  b.feature_path = "f/b.fmap";
  m.entries = {a, b};
  save_manifest(m, dir / "m.jsonl");
  const Manifest back = load_manifest(dir / "m.jsonl");
  EXPECT_EQ(back.dataset_name, "demo");
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(back.entries[0].mask_path, a.mask_path);
  EXPECT_EQ(back.entries[0].class_label, a.class_label);
  EXPECT_EQ(back.entries[0].attributes, a.attributes);
  EXPECT_FALSE(back.entries[1].mask_path);
  EXPECT_EQ(back.entries[1].feature_path, b.feature_path);
  EXPECT_EQ(back.resolve("images/a.png"), dir / "images/a.png");

  {
    std::ofstream out(dir / "dup.jsonl");
    out << R"({"patient_id":"P","series_id":"S","slice_index":0,"image_path":"x.png"})" << "\n"
        << R"({"patient_id":"P","series_id":"S","slice_index":0,"image_path":"y.png"})" << "\n";
  }
  EXPECT_EQ(code_of([&] { load_manifest(dir / "dup.jsonl"); }), ErrorCode::kDuplicate);
  {
    std::ofstream out(dir / "bad.jsonl");
    out << "{not json\n";
  }
  EXPECT_EQ(code_of([&] { load_manifest(dir / "bad.jsonl"); }), ErrorCode::kParse);
}

TEST(Manifest, SampleExamsKeepsOneSeriesPerPatient) {
  Manifest m;
  for (int p = 0; p < 6; ++p) {
    for (const char* s : {"B", "A"}) {
      ManifestEntry e;
      e.patient_id = "P" + std::to_string(p);
      e.series_id = s;
      e.image_path = "x.png";
      m.entries.push_back(e);
    }
  }
  const Manifest out = sample_exams(m, 4, 9);
  ASSERT_EQ(out.entries.size(), 4u);
  std::set<std::string> patients;
  for (const auto& e : out.entries) {
    EXPECT_EQ(e.series_id, "A");
    patients.insert(e.patient_id);
  }
  EXPECT_EQ(patients.size(), 4u);
  EXPECT_EQ(sample_exams(m, 4, 9).entries.size(), out.entries.size());
}

}  // namespace
}  // namespace slicebench
