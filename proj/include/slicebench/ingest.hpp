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
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slicebench/manifest.hpp"
#include "slicebench/tensor.hpp"

namespace slicebench {

using Orientation = std::array<std::array<double, 3>, 3>;  // rows: row dir, column dir, normal

struct Volume {
  NdArray<float> voxels;  // {D, H, W}
  std::array<double, 3> spacing_mm{1.0, 1.0, 1.0};  // dz, dy, dx
  std::vector<double> slice_positions;  // projection onto the slice normal, ascending
  std::string patient_id;
  std::string series_id;
  Orientation orientation{};
  /// De-identified attributes copied from the first slice.
  std::map<std::string, std::string> attributes;
  /// Files dropped because their orientation differed from the series mode.
  std::size_t n_reference_slices = 0;

  std::size_t depth() const { return voxels.dim(0); }
  std::size_t height() const { return voxels.dim(1); }
  std::size_t width() const { return voxels.dim(2); }
};

/// DICOM keywords copied into manifests; everything else is dropped.
const std::vector<std::string>& deidentified_attributes();

/// Tolerance below which two slice positions (mm) count as the same.
inline constexpr double kDuplicatePositionTolerance = 1e-4;

/// Assembles one series from the single-frame files in `dir` (non-recursive;
/// every regular file is read). Slices are ordered by their image position
/// projected onto the normal; pixel data is rescaled by slope and intercept.
/// Errors: kParse (unreadable file or unsupported pixel format), kMixedSeries,
/// kDuplicate, kSize (fewer than two slices).
Volume parse_dicom_series(const std::filesystem::path& dir);

struct ContinuityResult {
  bool accepted = true;
  std::string reason;
  /// Index of the first gap (between slices i and i+1) off the median.
  std::optional<std::size_t> offending_gap;
  /// Index of the slice that follows the offending gap.
  std::optional<std::size_t> slice_index;
};

/// Accepts iff every consecutive gap equals the median gap within rel_tol
/// (relative to the median). Total: degenerate inputs are rejected with a
/// reason rather than thrown.
ContinuityResult validate_continuity(const Volume& vol, double rel_tol = 0.01);
ContinuityResult validate_continuity(const std::vector<double>& positions, double rel_tol = 0.01);

enum class NormalizationMode { kSliceWise, kVolumeWise };

NormalizationMode parse_normalization(const std::string& s);  // "slice" | "volume"
std::string to_string(NormalizationMode mode);

/// Min-max maps each slice (or the whole volume) into [0, 1]; a constant
/// region becomes zeros.
Volume normalize(const Volume& vol, NormalizationMode mode);

/// round(255 * v) with halves away from zero, clamped to [0, 255].
std::uint8_t quantize_unit(float v);

struct IntensityRange {
  double min = 0.0;
  double max = 0.0;
};

/// Per-slice intensity range used by normalize() for the given mode.
std::vector<IntensityRange> intensity_ranges(const Volume& vol, NormalizationMode mode);

/// Writes `<out_dir>/<patient>/<series>/slice_NNNN.png` for every slice and
/// returns the entries with paths relative to `out_dir`. The original range
/// is recorded as the intensity_min / intensity_max attributes.
std::vector<ManifestEntry> export_slices(const Volume& vol, NormalizationMode mode,
                                         const std::filesystem::path& out_dir);

/// Rebuilds original intensities from exported PNGs and their recorded ranges.
NdArray<float> reconstruct_volume(const Manifest& manifest, const std::string& patient_id,
                                  const std::string& series_id);

struct CurationConfig {
  NormalizationMode mode = NormalizationMode::kSliceWise;
  double rel_tol = 0.01;
  int jobs = 1;
};

struct SeriesOutcome {
  std::string directory;  // relative to the input root
  bool accepted = false;
  std::string reason;
  std::optional<std::size_t> slice_index;
  std::string patient_id;
  std::string series_id;
  std::size_t n_slices = 0;
  std::size_t n_reference_slices = 0;
};

struct CurationResult {
  Manifest manifest;
  std::vector<SeriesOutcome> series;  // sorted by directory
  std::size_t accepted() const;
  std::size_t rejected() const;
};

/// Every directory under `in_dir` that directly contains files is treated
/// as one series. Accepted series are exported under `out_dir`, whose
/// `manifest.jsonl` and `curation.json` are written by the caller.
CurationResult curate(const std::filesystem::path& in_dir, const std::filesystem::path& out_dir,
                      const CurationConfig& cfg);

}  // namespace slicebench
