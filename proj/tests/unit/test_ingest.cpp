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

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "slicebench/dicom.hpp"
#include "slicebench/ingest.hpp"
#include "slicebench/png_io.hpp"
#include "slicebench/synth.hpp"
#include "support.hpp"

namespace slicebench {
namespace {

using testing::code_of;
namespace fs = std::filesystem;
namespace tags = dicom::tags;

// Minimal 16-bit axial slice at height z; pixel i holds base + i.
dicom::Dataset slice_at(double z, int instance, std::uint16_t base, const std::string& series = "1.2.3.4",
                        const std::string& iop = "1\\0\\0\\0\\1\\0") {
  dicom::Dataset ds;
  ds.set_string(tags::kSopClassUid, "UI", dicom::kMrImageStorage);
  ds.set_string(tags::kSopInstanceUid, "UI", "1.2.3.4." + std::to_string(instance));
  ds.set_string(tags::kPatientId, "LO", "PX");
  ds.set_string(tags::kModality, "CS", "MR");
  ds.set_string(tags::kSeriesInstanceUid, "UI", series);
  ds.set_string(tags::kImageOrientationPatient, "DS", iop);
  ds.set_string(tags::kImagePositionPatient, "DS", fmt::format("0\\0\\{}", z));
  ds.set_string(tags::kPixelSpacing, "DS", "0.5\\0.75");
  ds.set_u16(tags::kRows, 2);
  ds.set_u16(tags::kColumns, 3);
  ds.set_u16(tags::kSamplesPerPixel, 1);
  ds.set_u16(tags::kBitsAllocated, 16);
  ds.set_u16(tags::kBitsStored, 16);
  ds.set_u16(tags::kPixelRepresentation, 0);
  ds.set_string(tags::kRescaleSlope, "DS", "2");
  ds.set_string(tags::kRescaleIntercept, "DS", "-10");
  std::vector<std::uint8_t> px;
  for (std::uint16_t i = 0; i < 6; ++i) {
    const std::uint16_t v = static_cast<std::uint16_t>(base + i);
    px.push_back(static_cast<std::uint8_t>(v & 0xFF));
    px.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  ds.set(tags::kPixelData, "OW", px);
  return ds;
}

// Files named in reverse spatial order so sorting by name would be wrong.
void write_series(const testing::TempDir& dir, const std::vector<double>& zs) {
  for (std::size_t i = 0; i < zs.size(); ++i) {
    dicom::write_file(slice_at(zs[i], static_cast<int>(i), static_cast<std::uint16_t>(100 * i)),
                      dir / fmt::format("f{:02d}.dcm", zs.size() - i));
  }
}

TEST(Dicom, CodecRoundTrip) {
  const auto ds = slice_at(3.5, 1, 7);
  const auto back = dicom::parse(dicom::serialize(ds));
  EXPECT_EQ(back.string(tags::kPatientId), "PX");
  EXPECT_EQ(back.string(tags::kSopInstanceUid), "1.2.3.4.1");
  EXPECT_EQ(back.u16(tags::kRows), 2);
  EXPECT_EQ(*back.numbers(tags::kImagePositionPatient), (std::vector<double>{0, 0, 3.5}));
  EXPECT_EQ(back.find(tags::kPixelData)->value, ds.find(tags::kPixelData)->value);
}

TEST(Dicom, RejectsOtherTransferSyntaxesAndGarbage) {
  auto bytes = dicom::serialize(slice_at(0, 1, 0));
  const std::string lit = dicom::kExplicitVrLittleEndian;
  auto it = std::search(bytes.begin(), bytes.end(), lit.begin(), lit.end());
  ASSERT_NE(it, bytes.end());
  it[static_cast<long>(lit.size()) - 1] = '2';  // explicit VR big endian
  EXPECT_EQ(code_of([&] { dicom::parse(bytes); }), ErrorCode::kParse);
  const std::vector<std::uint8_t> junk(200, 0);
  EXPECT_EQ(code_of([&] { dicom::parse(junk); }), ErrorCode::kParse);
  auto cut = dicom::serialize(slice_at(0, 1, 0));
  cut.resize(cut.size() - 5);
  EXPECT_EQ(code_of([&] { dicom::parse(cut); }), ErrorCode::kParse);
}

TEST(Series, OrdersByPositionAndRescales) {
  testing::TempDir dir("series");
  write_series(dir, {0, 2, 4, 6, 8, 10, 12, 14});
  const Volume v = parse_dicom_series(dir.path());
  EXPECT_EQ(v.depth(), 8u);
  EXPECT_EQ(v.height(), 2u);
  EXPECT_EQ(v.width(), 3u);
  EXPECT_DOUBLE_EQ(v.spacing_mm[0], 2.0);
  EXPECT_DOUBLE_EQ(v.spacing_mm[1], 0.5);
  EXPECT_DOUBLE_EQ(v.spacing_mm[2], 0.75);
  EXPECT_EQ(v.patient_id, "PX");
  EXPECT_EQ(v.series_id, "1.2.3.4");
  EXPECT_EQ(v.attributes.at("Modality"), "MR");
  EXPECT_FALSE(v.attributes.contains("PatientID"));
  for (std::size_t z = 0; z < 8; ++z) {
    EXPECT_DOUBLE_EQ(v.slice_positions[z], 2.0 * z);
    // raw = 100 z + i; value = 2 raw - 10
    EXPECT_FLOAT_EQ(v.voxels(z, 1, 2), static_cast<float>(2 * (100 * z + 5) - 10));
  }
  EXPECT_TRUE(validate_continuity(v).accepted);
}

TEST(Series, StructuralErrors) {
  {
    testing::TempDir dir("mixed");
    write_series(dir, {0, 2});
    dicom::write_file(slice_at(4, 9, 0, "9.9.9"), dir / "other.dcm");
    EXPECT_EQ(code_of([&] { parse_dicom_series(dir.path()); }), ErrorCode::kMixedSeries);
  }
  {
    testing::TempDir dir("dup");
    write_series(dir, {0, 2, 2});
    EXPECT_EQ(code_of([&] { parse_dicom_series(dir.path()); }), ErrorCode::kDuplicate);
  }
  {
    testing::TempDir dir("one");
    write_series(dir, {0});
    EXPECT_EQ(code_of([&] { parse_dicom_series(dir.path()); }), ErrorCode::kSize);
  }
}

TEST(Series, ReferenceSliceIsSetAsideAndCurationRejects) {
  testing::TempDir in("refin"), out("refout");
  fs::create_directories(in / "a");
  for (int i = 0; i < 4; ++i) dicom::write_file(slice_at(2.0 * i, i, 0), in.path() / "a" / fmt::format("s{}.dcm", i));
  dicom::write_file(slice_at(30, 9, 0, "1.2.3.4", "0\\1\\0\\0\\0\\-1"), in.path() / "a" / "loc.dcm");
  const Volume v = parse_dicom_series(in.path() / "a");
  EXPECT_EQ(v.depth(), 4u);
  EXPECT_EQ(v.n_reference_slices, 1u);
  const auto res = curate(in.path(), out.path(), {});
  ASSERT_EQ(res.series.size(), 1u);
  EXPECT_FALSE(res.series[0].accepted);
  EXPECT_EQ(res.series[0].n_reference_slices, 1u);
  EXPECT_TRUE(res.manifest.entries.empty());
}

TEST(Continuity, GapRules) {
  const auto gap = validate_continuity(std::vector<double>{0, 2, 4, 8, 10});
  EXPECT_FALSE(gap.accepted);
  EXPECT_EQ(gap.offending_gap, 2u);
  EXPECT_EQ(gap.slice_index, 3u);
  EXPECT_FALSE(gap.reason.empty());
  EXPECT_TRUE(validate_continuity(std::vector<double>{0, 2, 4.01, 6.01}).accepted);
  EXPECT_FALSE(validate_continuity(std::vector<double>{0, 2, 4.05, 6.05}).accepted);
  EXPECT_FALSE(validate_continuity(std::vector<double>{0}).accepted);
  EXPECT_FALSE(validate_continuity(std::vector<double>{0, 0}).accepted);
}

TEST(Continuity, UniformAcceptedAndInteriorRemovalRejected) {
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = 4 + rng.index(20);
    const double dz = 0.5 + 4 * rng.uniform(), z0 = 100 * rng.normal();
    std::vector<double> zs;
    for (std::size_t i = 0; i < d; ++i) zs.push_back(z0 + dz * static_cast<double>(i));
    ASSERT_TRUE(validate_continuity(zs).accepted);
    const std::size_t drop = 1 + rng.index(d - 2);
    std::vector<double> holed = zs;
    holed.erase(holed.begin() + static_cast<long>(drop));
    const auto res = validate_continuity(holed);
    EXPECT_FALSE(res.accepted);
    // With three slices left the median sits between the two gaps.
    if (d >= 5) EXPECT_EQ(res.slice_index, drop);
  }
}

Volume two_slices() {
  Volume v;
  v.voxels = NdArray<float>({2, 1, 2}, {0, 1, 0, 10});
  v.slice_positions = {0, 1};
  v.patient_id = "P";
  v.series_id = "S";
  return v;
}

TEST(Normalize, TwoSliceHandComputation) {
  const Volume v = two_slices();
  const Volume s = normalize(v, NormalizationMode::kSliceWise);
  EXPECT_EQ(s.voxels.data()[0], 0.0f);
  EXPECT_EQ(s.voxels.data()[1], 1.0f);
  EXPECT_EQ(s.voxels.data()[2], 0.0f);
  EXPECT_EQ(s.voxels.data()[3], 1.0f);
  const Volume w = normalize(v, NormalizationMode::kVolumeWise);
  EXPECT_EQ(w.voxels.data()[0], 0.0f);
  EXPECT_FLOAT_EQ(w.voxels.data()[1], 0.1f);
  EXPECT_EQ(w.voxels.data()[2], 0.0f);
  EXPECT_EQ(w.voxels.data()[3], 1.0f);

  Volume c = v;
  c.voxels = NdArray<float>({2, 1, 2}, 7.0f);
  const Volume flat = normalize(c, NormalizationMode::kSliceWise);
  for (float x : flat.voxels.data()) EXPECT_EQ(x, 0.0f);
}

TEST(Normalize, IdempotentAndBounded) {
  Rng rng(10);
  Volume v;
  v.voxels = NdArray<float>({3, 5, 4});
  for (auto& x : v.voxels.data()) x = static_cast<float>(50 + 30 * rng.normal());
  v.slice_positions = {0, 1, 2};
  for (auto mode : {NormalizationMode::kSliceWise, NormalizationMode::kVolumeWise}) {
    const Volume once = normalize(v, mode);
    const Volume twice = normalize(once, mode);
    for (std::size_t i = 0; i < once.voxels.size(); ++i) {
      EXPECT_GE(once.voxels.data()[i], 0.0f);
      EXPECT_LE(once.voxels.data()[i], 1.0f);
      EXPECT_NEAR(twice.voxels.data()[i], once.voxels.data()[i], 1e-7);
    }
  }
  EXPECT_EQ(parse_normalization("volume"), NormalizationMode::kVolumeWise);
  EXPECT_EQ(code_of([] { parse_normalization("z"); }), ErrorCode::kValidation);
}

TEST(Export, QuantizationAndReconstruction) {
  EXPECT_EQ(quantize_unit(0.0f), 0);
  EXPECT_EQ(quantize_unit(0.5f), 128);
  EXPECT_EQ(quantize_unit(1.0f), 255);
  EXPECT_EQ(quantize_unit(1.5f), 255);
  EXPECT_EQ(quantize_unit(-0.2f), 0);

  testing::TempDir dir("export");
  Rng rng(12);
  Volume v;
  v.voxels = NdArray<float>({4, 6, 5});
  for (auto& x : v.voxels.data()) x = static_cast<float>(-300 + 1000 * rng.uniform());
  v.slice_positions = {0, 2, 4, 6};
  v.patient_id = "P/1";
  v.series_id = "1.2";
  for (auto mode : {NormalizationMode::kSliceWise, NormalizationMode::kVolumeWise}) {
    Manifest m;
    m.base_dir = dir.path();
    m.entries = export_slices(v, mode, dir.path());
    ASSERT_EQ(m.entries.size(), 4u);
    EXPECT_EQ(m.entries[0].image_path, "P_1/1.2/slice_0000.png");
    const auto back = reconstruct_volume(m, "P/1", "1.2");
    const auto ranges = intensity_ranges(v, mode);
    const std::size_t plane = 30;
    for (std::size_t i = 0; i < back.size(); ++i) {
      const auto& r = ranges[i / plane];
      EXPECT_LE(std::abs(back.data()[i] - v.voxels.data()[i]), (r.max - r.min) / 255.0 + 1e-3);
    }
  }
}

TEST(Curate, AcceptsCompleteAndRejectsDroppedSlice) {
  testing::TempDir in("curin"), out("curout");
  SynthSpec spec;
  spec.n_volumes = 2;
  spec.slices_per_volume = 6;
  spec.image_h = spec.image_w = 16;
  const auto vols = render_dataset(spec);
  make_dicom_series(spec, vols[0], in / "a");
  DicomOptions drop;
  drop.drop_slice = 3;
  make_dicom_series(spec, vols[1], in / "b", drop);
  CurationConfig cfg;
  cfg.mode = NormalizationMode::kVolumeWise;
  const auto res = curate(in.path(), out.path(), cfg);
  ASSERT_EQ(res.series.size(), 2u);
  EXPECT_TRUE(res.series[0].accepted);
  EXPECT_FALSE(res.series[1].accepted);
  EXPECT_EQ(res.series[1].slice_index, 3u);
  EXPECT_EQ(res.accepted(), 1u);
  ASSERT_EQ(res.manifest.entries.size(), 6u);

  const auto back = reconstruct_volume(res.manifest, vols[0].patient_id, vols[0].series_id);
  double lo = 1e300, hi = -1e300;
  for (const auto& s : vols[0].slices)
    for (float u : s.image.data()) {
      lo = std::min<double>(lo, synth_scanner_value(u));
      hi = std::max<double>(hi, synth_scanner_value(u));
    }
  for (std::size_t z = 0; z < 6; ++z)
    for (std::size_t i = 0; i < 256; ++i) {
      const double truth = synth_scanner_value(vols[0].slices[z].image.data()[i]);
      EXPECT_LE(std::abs(back.data()[z * 256 + i] - truth), (hi - lo) / 255.0 + 1e-3);
    }
}

}  // namespace
}  // namespace slicebench
