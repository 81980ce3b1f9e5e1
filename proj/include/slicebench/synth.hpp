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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "slicebench/manifest.hpp"
#include "slicebench/stats.hpp"
#include "slicebench/tensor.hpp"

namespace slicebench {

enum class ObjectKind { kEllipse, kTwoBlobs, kRamp, kConstant };

/// Feature proxies. These are oracles for testing the pipeline, not
/// emulations of an encoder.
enum class FeatureMode {
  kOneHotOracle,         // one-hot of the per-patch majority mask label
  kIntensityPositional,  // (mean intensity, y, x, variance) per patch
  kNoise,                // seeded N(0, 1) channels
};

ObjectKind parse_object_kind(const std::string& s);
FeatureMode parse_feature_mode(const std::string& s);
std::string to_string(ObjectKind kind);
std::string to_string(FeatureMode mode);

struct FeatureOptions {
  FeatureMode mode = FeatureMode::kIntensityPositional;
  int patch_size = 4;
  std::uint64_t seed = 0;
  int noise_channels = 8;
  /// Scale of the y and x channels of kIntensityPositional relative to
  /// intensity, which lies in [0, 1].
  double positional_weight = 0.25;
  std::string encoder_id;  // defaults to "synth-<mode>"

  void validate() const;
};

struct SynthSpec {
  std::uint64_t seed = 0;
  std::size_t image_h = 64;
  std::size_t image_w = 64;
  std::size_t n_volumes = 4;
  std::size_t slices_per_volume = 8;
  ObjectKind object_kind = ObjectKind::kEllipse;
  double noise_sigma = 0.05;
  int n_classes = 4;  // class_label = rank of the object area, in n_classes groups
  double slice_spacing_mm = 2.0;
  FeatureOptions features;
  bool write_features = true;
  bool write_dicom = false;
  std::optional<std::size_t> drop_slice;  // applied to the first volume's DICOM series
  std::size_t records = 0;                // synthetic (delta, FRD) records to write

  void validate() const;
};

/// JSON object with the field names used by SynthSpec; `image_size` is
/// [H, W] and the feature fields are top-level (feature_mode, patch_size,
/// positional_weight, noise_channels). Unknown keys are a validation error.
SynthSpec parse_synth_spec(const std::string& json_text);
SynthSpec load_synth_spec(const std::filesystem::path& path);
std::string synth_spec_json(const SynthSpec& spec);

struct SynthSlice {
  SliceKey key;
  NdArray<float> image;  // {H, W}, multiples of 1/255
  LabelMask mask;        // binary {H, W}
  int class_label = 0;
};

struct SynthVolume {
  std::string patient_id;
  std::string series_id;  // equals the DICOM SeriesInstanceUID
  std::vector<SynthSlice> slices;
};

std::string synth_series_uid(std::uint64_t seed, std::size_t volume);

/// Renders every volume. Deterministic per spec; the mask is the exact
/// pixel set that received object intensity.
std::vector<SynthVolume> render_dataset(const SynthSpec& spec);

/// Writes images/, masks/ and manifest.jsonl under out_dir; returns the
/// manifest (base_dir = out_dir).
Manifest write_dataset(const std::vector<SynthVolume>& volumes, const SynthSpec& spec,
                       const std::filesystem::path& out_dir, const std::string& name = "synth");

/// Feature map for one image. `mask` is required for kOneHotOracle; `stream`
/// selects the noise stream for kNoise. H and W must be multiples of the
/// patch size.
FeatureMap make_feature_map(const NdArray<float>& image, const LabelMask* mask,
                            const FeatureOptions& opts, std::uint64_t stream,
                            const std::string& slice_ref);

/// Writes features/<patient>/<series>/slice_NNNN.fmap for every entry of
/// `images`, copying the masks from `gt` (joined on the slice key) when
/// given. Returns the feature manifest; every other field of the entries
/// is preserved.
Manifest make_features(const Manifest& images, const Manifest* gt, const FeatureOptions& opts,
                       const std::filesystem::path& out_dir, std::size_t jobs = 1);

struct DicomOptions {
  std::optional<std::size_t> drop_slice;
  bool add_reference_slice = false;  // an extra sagittal localizer
  double rescale_slope = 0.5;
  double rescale_intercept = -100.0;
};

/// Scanner intensities the DICOM writer encodes for a rendered slice:
/// 100 + 900 * image.
float synth_scanner_value(float unit);

/// Writes one single-frame file per slice into out_dir, named in a seeded
/// order that differs from the spatial order. Returns out_dir.
std::filesystem::path make_dicom_series(const SynthSpec& spec, const SynthVolume& volume,
                                        const std::filesystem::path& out_dir,
                                        const DicomOptions& opts = {});

/// delta = slope * frd + noise over n records with FRD drawn in [1, 10].
std::vector<CorrelationRecord> make_records(std::size_t n, std::uint64_t seed, double slope = -0.5,
                                            double noise_sigma = 0.25);

struct SynthOutputs {
  Manifest dataset;
  std::optional<Manifest> features;
  std::vector<std::filesystem::path> dicom_dirs;
  std::optional<std::filesystem::path> records;
};

/// Full `synth` run: dataset, then features, DICOM series and records as
/// the spec requests. Writes spec.json alongside.
SynthOutputs run_synth(const SynthSpec& spec, const std::filesystem::path& out_dir,
                       std::size_t jobs = 1);

}  // namespace slicebench
