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

#include "slicebench/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "slicebench/dicom.hpp"
#include "slicebench/error.hpp"
#include "slicebench/parallel.hpp"
#include "slicebench/png_io.hpp"

namespace slicebench {
namespace {

namespace fs = std::filesystem;
using dicom::Dataset;
namespace tags = dicom::tags;

struct AttributeTag {
  const char* keyword;
  dicom::Tag tag;
};

const std::vector<AttributeTag>& attribute_tags() {
  static const std::vector<AttributeTag> kTags = {
      {"BodyPartExamined", tags::kBodyPartExamined},
      {"EchoTime", tags::kEchoTime},
      {"MagneticFieldStrength", tags::kMagneticFieldStrength},
      {"Manufacturer", tags::kManufacturer},
      {"Modality", tags::kModality},
      {"RepetitionTime", tags::kRepetitionTime},
      {"ScanningSequence", tags::kScanningSequence},
      {"SeriesDescription", tags::kSeriesDescription},
      {"SliceThickness", tags::kSliceThickness},
  };
  return kTags;
}

struct SliceFile {
  std::string name;
  Dataset ds;
  std::array<double, 6> iop{};
  std::array<double, 3> ipp{};
  double position = 0.0;
};

std::string required_string(const Dataset& ds, dicom::Tag t, const std::string& what,
                            const std::string& file) {
  auto s = ds.string(t);
  if (!s || s->empty()) fail(ErrorCode::kParse, file + ": missing " + what);
  return *s;
}

std::vector<double> required_numbers(const Dataset& ds, dicom::Tag t, std::size_t n,
                                     const std::string& what, const std::string& file) {
  auto v = ds.numbers(t);
  if (!v || v->size() != n) fail(ErrorCode::kParse, file + ": missing or malformed " + what);
  return *v;
}

std::string orientation_key(const std::array<double, 6>& iop) {
  std::string key;
  for (double v : iop) key += fmt::format("{:.3f};", v == 0.0 ? 0.0 : v);
  return key;
}

std::array<double, 3> cross(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<float> decode_pixels(const Dataset& ds, std::size_t rows, std::size_t cols,
                                 const std::string& file) {
  if (ds.u16(tags::kSamplesPerPixel).value_or(1) != 1) {
    fail(ErrorCode::kParse, file + ": only single-channel images are supported");
  }
  if (auto frames = ds.numbers(tags::kNumberOfFrames); frames && !frames->empty() && (*frames)[0] > 1) {
    fail(ErrorCode::kParse, file + ": multi-frame images are not supported");
  }
  const auto bits = ds.u16(tags::kBitsAllocated).value_or(16);
  const bool is_signed = ds.u16(tags::kPixelRepresentation).value_or(0) == 1;
  if (bits != 8 && bits != 16) fail(ErrorCode::kParse, file + ": unsupported BitsAllocated");
  const dicom::Element* px = ds.find(tags::kPixelData);
  if (px == nullptr) fail(ErrorCode::kParse, file + ": no pixel data");
  const std::size_t n = rows * cols;
  const std::size_t bytes_per = bits / 8;
  if (px->value.size() < n * bytes_per) fail(ErrorCode::kParse, file + ": pixel data too short");

  double slope = 1.0, intercept = 0.0;
  if (auto s = ds.numbers(tags::kRescaleSlope); s && !s->empty()) slope = (*s)[0];
  if (auto i = ds.numbers(tags::kRescaleIntercept); i && !i->empty()) intercept = (*i)[0];

  std::vector<float> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double raw = 0.0;
    if (bits == 8) {
      const std::uint8_t b = px->value[i];
      raw = is_signed ? static_cast<double>(static_cast<std::int8_t>(b)) : b;
    } else {
      const std::uint16_t w =
          static_cast<std::uint16_t>(px->value[2 * i] | (px->value[2 * i + 1] << 8));
      raw = is_signed ? static_cast<double>(static_cast<std::int16_t>(w)) : w;
    }
    out[i] = static_cast<float>(raw * slope + intercept);
  }
  return out;
}

std::string path_component(const std::string& id) {
  std::string out;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

}  // namespace

const std::vector<std::string>& deidentified_attributes() {
  static const std::vector<std::string> kNames = [] {
    std::vector<std::string> names;
    for (const auto& a : attribute_tags()) names.push_back(a.keyword);
    return names;
  }();
  return kNames;
}

Volume parse_dicom_series(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  if (ec) fail(ErrorCode::kParse, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());

  std::vector<SliceFile> slices;
  std::string series_uid;
  for (const auto& path : files) {
    SliceFile s;
    s.name = path.filename().string();
    s.ds = dicom::read_file(path);
    const std::string uid = required_string(s.ds, tags::kSeriesInstanceUid, "SeriesInstanceUID", s.name);
    if (series_uid.empty()) {
      series_uid = uid;
    } else if (uid != series_uid) {
      fail(ErrorCode::kMixedSeries, dir.string() + ": files from series " + series_uid + " and " + uid);
    }
    const auto iop = required_numbers(s.ds, tags::kImageOrientationPatient, 6, "ImageOrientationPatient", s.name);
    const auto ipp = required_numbers(s.ds, tags::kImagePositionPatient, 3, "ImagePositionPatient", s.name);
    std::copy(iop.begin(), iop.end(), s.iop.begin());
    std::copy(ipp.begin(), ipp.end(), s.ipp.begin());
    slices.push_back(std::move(s));
  }
  if (slices.size() < 2) {
    fail(ErrorCode::kSize, dir.string() + ": a series needs at least two slices");
  }

  // Mode orientation; ties go to the orientation seen first in file order.
  std::map<std::string, std::size_t> counts;
  std::vector<std::string> order;
  for (const auto& s : slices) {
    const auto key = orientation_key(s.iop);
    if (counts[key]++ == 0) order.push_back(key);
  }
  std::string mode_key = order.front();
  for (const auto& key : order) {
    if (counts[key] > counts[mode_key]) mode_key = key;
  }
  Volume vol;
  std::vector<SliceFile> kept;
  for (auto& s : slices) {
    if (orientation_key(s.iop) == mode_key) {
      kept.push_back(std::move(s));
    } else {
      ++vol.n_reference_slices;
    }
  }
  if (kept.size() < 2) fail(ErrorCode::kSize, dir.string() + ": fewer than two slices share an orientation");

  const std::array<double, 3> row{kept[0].iop[0], kept[0].iop[1], kept[0].iop[2]};
  const std::array<double, 3> col{kept[0].iop[3], kept[0].iop[4], kept[0].iop[5]};
  const auto normal = cross(row, col);
  vol.orientation = {row, col, normal};
  for (auto& s : kept) {
    s.position = s.ipp[0] * normal[0] + s.ipp[1] * normal[1] + s.ipp[2] * normal[2];
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const SliceFile& a, const SliceFile& b) { return a.position < b.position; });
  for (std::size_t i = 1; i < kept.size(); ++i) {
    if (std::abs(kept[i].position - kept[i - 1].position) < kDuplicatePositionTolerance) {
      fail(ErrorCode::kDuplicate, dir.string() + ": " + kept[i - 1].name + " and " + kept[i].name +
                                      " share slice position " + fmt::format("{}", kept[i].position));
    }
  }

  const Dataset& first = kept.front().ds;
  const auto rows = first.u16(tags::kRows);
  const auto cols = first.u16(tags::kColumns);
  if (!rows || !cols || *rows == 0 || *cols == 0) fail(ErrorCode::kParse, kept.front().name + ": missing Rows/Columns");
  const std::size_t h = *rows, w = *cols;
  std::vector<float> voxels;
  voxels.reserve(kept.size() * h * w);
  for (const auto& s : kept) {
    if (s.ds.u16(tags::kRows) != rows || s.ds.u16(tags::kColumns) != cols) {
      fail(ErrorCode::kDimension, dir.string() + ": slices differ in size");
    }
    const auto px = decode_pixels(s.ds, h, w, s.name);
    voxels.insert(voxels.end(), px.begin(), px.end());
    vol.slice_positions.push_back(s.position);
  }
  vol.voxels = NdArray<float>({kept.size(), h, w}, std::move(voxels));

  std::vector<double> gaps;
  for (std::size_t i = 1; i < vol.slice_positions.size(); ++i) {
    gaps.push_back(vol.slice_positions[i] - vol.slice_positions[i - 1]);
  }
  vol.spacing_mm[0] = median(gaps);
  if (auto ps = first.numbers(tags::kPixelSpacing); ps && ps->size() == 2) {
    if (!((*ps)[0] > 0.0) || !((*ps)[1] > 0.0)) fail(ErrorCode::kParse, "non-positive PixelSpacing");
    vol.spacing_mm[1] = (*ps)[0];
    vol.spacing_mm[2] = (*ps)[1];
  }
  vol.series_id = series_uid;
  vol.patient_id = first.string(tags::kPatientId).value_or("");
  if (vol.patient_id.empty()) fail(ErrorCode::kParse, kept.front().name + ": missing PatientID");
  for (const auto& a : attribute_tags()) {
    if (auto v = first.string(a.tag); v && !v->empty()) vol.attributes[a.keyword] = *v;
  }
  return vol;
}

ContinuityResult validate_continuity(const std::vector<double>& positions, double rel_tol) {
  ContinuityResult out;
  if (positions.size() < 2) {
    out.accepted = false;
    out.reason = "fewer than two slices";
    return out;
  }
  std::vector<double> gaps;
  for (std::size_t i = 1; i < positions.size(); ++i) gaps.push_back(positions[i] - positions[i - 1]);
  const double med = median(gaps);
  if (!(med > 0.0) || !std::isfinite(med)) {
    out.accepted = false;
    out.reason = "non-positive median slice gap";
    return out;
  }
  // The tiny slack keeps a gap that sits exactly on the boundary from being
  // rejected by rounding in the subtraction.
  const double limit = rel_tol * med * (1.0 + 1e-12);
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (!(std::abs(gaps[i] - med) <= limit)) {
      out.accepted = false;
      out.offending_gap = i;
      out.slice_index = i + 1;
      out.reason = fmt::format("gap {} is {} mm, median {} mm (missing slice before index {})", i,
                               gaps[i], med, i + 1);
      return out;
    }
  }
  return out;
}

ContinuityResult validate_continuity(const Volume& vol, double rel_tol) {
  return validate_continuity(vol.slice_positions, rel_tol);
}

NormalizationMode parse_normalization(const std::string& s) {
  if (s == "slice" || s == "slice_wise") return NormalizationMode::kSliceWise;
  if (s == "volume" || s == "volume_wise") return NormalizationMode::kVolumeWise;
  fail(ErrorCode::kValidation, "unknown normalization '" + s + "' (expected slice or volume)");
}

std::string to_string(NormalizationMode mode) {
  return mode == NormalizationMode::kSliceWise ? "slice" : "volume";
}

std::vector<IntensityRange> intensity_ranges(const Volume& vol, NormalizationMode mode) {
  const std::size_t d = vol.depth(), plane = vol.height() * vol.width();
  const auto data = vol.voxels.data();
  std::vector<IntensityRange> out(d);
  for (std::size_t z = 0; z < d; ++z) {
    const auto [lo, hi] = std::minmax_element(data.begin() + z * plane, data.begin() + (z + 1) * plane);
    out[z] = {*lo, *hi};
  }
  if (mode == NormalizationMode::kVolumeWise) {
    IntensityRange all = out.front();
    for (const auto& r : out) {
      all.min = std::min(all.min, r.min);
      all.max = std::max(all.max, r.max);
    }
    std::fill(out.begin(), out.end(), all);
  }
  return out;
}

Volume normalize(const Volume& vol, NormalizationMode mode) {
  Volume out = vol;
  const std::size_t plane = vol.height() * vol.width();
  const auto ranges = intensity_ranges(vol, mode);
  auto src = vol.voxels.data();
  auto dst = out.voxels.data();
  for (std::size_t z = 0; z < vol.depth(); ++z) {
    const double lo = ranges[z].min, span = ranges[z].max - ranges[z].min;
    for (std::size_t i = z * plane; i < (z + 1) * plane; ++i) {
      dst[i] = span > 0.0 ? static_cast<float>((src[i] - lo) / span) : 0.0f;
    }
  }
  return out;
}

std::uint8_t quantize_unit(float v) {
  const double scaled = std::round(255.0 * static_cast<double>(v));  // halves away from zero
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

std::vector<ManifestEntry> export_slices(const Volume& vol, NormalizationMode mode,
                                         const fs::path& out_dir) {
  const auto ranges = intensity_ranges(vol, mode);
  const Volume norm = normalize(vol, mode);
  const std::size_t h = vol.height(), w = vol.width(), plane = h * w;
  const fs::path rel_dir = fs::path(path_component(vol.patient_id)) / path_component(vol.series_id);
  fs::create_directories(out_dir / rel_dir);
  std::vector<ManifestEntry> entries;
  for (std::size_t z = 0; z < vol.depth(); ++z) {
    NdArray<std::uint8_t> img({h, w});
    for (std::size_t i = 0; i < plane; ++i) img.data()[i] = quantize_unit(norm.voxels.data()[z * plane + i]);
    const fs::path rel = rel_dir / fmt::format("slice_{:04d}.png", z);
    save_gray_png(img, out_dir / rel);
    ManifestEntry e;
    e.patient_id = vol.patient_id;
    e.series_id = vol.series_id;
    e.slice_index = static_cast<int>(z);
    e.image_path = rel.generic_string();
    e.attributes = vol.attributes;
    e.attributes["intensity_min"] = fmt::format("{}", ranges[z].min);
    e.attributes["intensity_max"] = fmt::format("{}", ranges[z].max);
    e.attributes["normalization"] = to_string(mode);
    e.attributes["slice_position"] = fmt::format("{}", vol.slice_positions.at(z));
    e.attributes["spacing_mm"] =
        fmt::format("{}\\{}\\{}", vol.spacing_mm[0], vol.spacing_mm[1], vol.spacing_mm[2]);
    entries.push_back(std::move(e));
  }
  return entries;
}

NdArray<float> reconstruct_volume(const Manifest& manifest, const std::string& patient_id,
                                  const std::string& series_id) {
  std::vector<const ManifestEntry*> rows;
  for (const auto& e : manifest.entries) {
    if (e.patient_id == patient_id && e.series_id == series_id) rows.push_back(&e);
  }
  if (rows.empty()) fail(ErrorCode::kEmptySelection, "no slices for " + patient_id + "/" + series_id);
  std::sort(rows.begin(), rows.end(),
            [](const ManifestEntry* a, const ManifestEntry* b) { return a->slice_index < b->slice_index; });
  std::vector<float> data;
  std::size_t h = 0, w = 0;
  for (const ManifestEntry* e : rows) {
    const auto lo = e->attributes.find("intensity_min");
    const auto hi = e->attributes.find("intensity_max");
    if (lo == e->attributes.end() || hi == e->attributes.end()) {
      fail(ErrorCode::kValidation, e->key().str() + ": no recorded intensity range");
    }
    const double mn = std::stod(lo->second), mx = std::stod(hi->second);
    const auto img = load_gray_png(manifest.resolve(e->image_path));
    if (h == 0) {
      h = img.dim(0);
      w = img.dim(1);
    } else if (img.dim(0) != h || img.dim(1) != w) {
      fail(ErrorCode::kDimension, "slices of one series differ in size");
    }
    for (std::uint8_t p : img.data()) {
      data.push_back(static_cast<float>(mn + (mx - mn) * (p / 255.0)));
    }
  }
  return NdArray<float>({rows.size(), h, w}, std::move(data));
}

std::size_t CurationResult::accepted() const {
  return static_cast<std::size_t>(std::count_if(series.begin(), series.end(),
                                                [](const SeriesOutcome& s) { return s.accepted; }));
}

std::size_t CurationResult::rejected() const { return series.size() - accepted(); }

CurationResult curate(const fs::path& in_dir, const fs::path& out_dir, const CurationConfig& cfg) {
  if (!fs::is_directory(in_dir)) fail(ErrorCode::kValidation, "input is not a directory: " + in_dir.string());
  if (!(cfg.rel_tol > 0.0)) fail(ErrorCode::kValidation, "rel_tol must be positive");

  std::vector<fs::path> dirs;
  auto has_files = [](const fs::path& d) {
    for (const auto& e : fs::directory_iterator(d)) {
      if (e.is_regular_file()) return true;
    }
    return false;
  };
  if (has_files(in_dir)) dirs.push_back(in_dir);
  for (const auto& e : fs::recursive_directory_iterator(in_dir)) {
    if (e.is_directory() && has_files(e.path())) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());

  CurationResult result;
  result.series.resize(dirs.size());
  std::vector<std::optional<Volume>> volumes(dirs.size());
  parallel_for(dirs.size(), static_cast<std::size_t>(std::max(1, cfg.jobs)), [&](std::size_t i) {
    SeriesOutcome& out = result.series[i];
    out.directory = fs::relative(dirs[i], in_dir).generic_string();
    try {
      Volume vol = parse_dicom_series(dirs[i]);
      out.patient_id = vol.patient_id;
      out.series_id = vol.series_id;
      out.n_slices = vol.depth();
      out.n_reference_slices = vol.n_reference_slices;
      if (vol.n_reference_slices > 0) {
        out.reason = fmt::format("{} reference slice(s) off the series orientation", vol.n_reference_slices);
        return;
      }
      const auto cont = validate_continuity(vol, cfg.rel_tol);
      if (!cont.accepted) {
        out.reason = cont.reason;
        out.slice_index = cont.slice_index;
        return;
      }
      out.accepted = true;
      volumes[i] = std::move(vol);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kIo) throw;
      out.reason = std::string(to_string(e.code())) + ": " + e.what();
    }
  });

  // A (patient, series) pair may only be exported once; later directories lose.
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (!volumes[i]) continue;
    if (!seen.insert({volumes[i]->patient_id, volumes[i]->series_id}).second) {
      result.series[i].accepted = false;
      result.series[i].reason = "series already exported from another directory";
      volumes[i].reset();
    }
  }

  std::vector<std::vector<ManifestEntry>> exported(dirs.size());
  parallel_for(dirs.size(), static_cast<std::size_t>(std::max(1, cfg.jobs)), [&](std::size_t i) {
    if (volumes[i]) exported[i] = export_slices(*volumes[i], cfg.mode, out_dir);
  });
  result.manifest.dataset_name = in_dir.filename().empty() ? "curated" : in_dir.filename().string();
  result.manifest.base_dir = out_dir;
  for (auto& part : exported) {
    for (auto& e : part) result.manifest.entries.push_back(std::move(e));
  }
  std::sort(result.manifest.entries.begin(), result.manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.key() < b.key(); });
  return result;
}

}  // namespace slicebench
