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

#include "slicebench/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "slicebench/dicom.hpp"
#include "slicebench/error.hpp"
#include "slicebench/fmap.hpp"
#include "slicebench/parallel.hpp"
#include "slicebench/png_io.hpp"
#include "slicebench/rng.hpp"

namespace slicebench {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

constexpr const char* kUidRoot = "1.2.826.0.1.3680043.10.543";

float quantize_to_unit(double v) {
  const double q = std::round(255.0 * std::clamp(v, 0.0, 1.0));
  return static_cast<float>(q / 255.0);
}

struct Shape {
  // Ellipse parameters in pixel units; two_blobs and ramp reuse some fields.
  double cy = 0, cx = 0, ry = 0, rx = 0, angle = 0;
  double cy2 = 0, cx2 = 0, r2 = 0;
  double split = 0;
  double background = 0.2;
  double foreground = 0.8;
};

Shape draw_shape(const SynthSpec& spec, Rng& rng) {
  const double h = static_cast<double>(spec.image_h), w = static_cast<double>(spec.image_w);
  Shape s;
  s.background = rng.uniform(0.1, 0.3);
  s.foreground = rng.uniform(0.65, 0.9);
  switch (spec.object_kind) {
    case ObjectKind::kEllipse:
      s.cy = h * rng.uniform(0.4, 0.6);
      s.cx = w * rng.uniform(0.4, 0.6);
      s.ry = h * rng.uniform(0.15, 0.3);
      s.rx = w * rng.uniform(0.15, 0.3);
      s.angle = rng.uniform(0.0, std::numbers::pi);
      break;
    case ObjectKind::kTwoBlobs:
      s.cy = h * rng.uniform(0.45, 0.55);
      s.cx = w * rng.uniform(0.22, 0.28);
      s.cy2 = h * rng.uniform(0.45, 0.55);
      s.cx2 = w * rng.uniform(0.72, 0.78);
      s.ry = std::min(h, w) * rng.uniform(0.1, 0.14);
      s.r2 = std::min(h, w) * rng.uniform(0.1, 0.14);
      break;
    case ObjectKind::kRamp:
      s.split = w * rng.uniform(0.4, 0.6);
      break;
    case ObjectKind::kConstant:
      break;
  }
  return s;
}

// Object footprint of slice z; scale shrinks toward both ends of the volume.
bool inside(const Shape& s, ObjectKind kind, double scale, double y, double x) {
  switch (kind) {
    case ObjectKind::kEllipse: {
      const double dy = y - s.cy, dx = x - s.cx;
      const double c = std::cos(s.angle), sn = std::sin(s.angle);
      const double u = (c * dy + sn * dx) / (s.ry * scale);
      const double v = (-sn * dy + c * dx) / (s.rx * scale);
      return u * u + v * v <= 1.0;
    }
    case ObjectKind::kTwoBlobs: {
      const double a = std::hypot(y - s.cy, x - s.cx), b = std::hypot(y - s.cy2, x - s.cx2);
      return a <= s.ry * scale || b <= s.r2 * scale;
    }
    case ObjectKind::kRamp:
      return x >= s.split;
    case ObjectKind::kConstant:
      return false;
  }
  return false;
}

ordered_json spec_to_json(const SynthSpec& spec) {
  ordered_json j;
  j["seed"] = spec.seed;
  j["image_size"] = {spec.image_h, spec.image_w};
  j["n_volumes"] = spec.n_volumes;
  j["slices_per_volume"] = spec.slices_per_volume;
  j["object_kind"] = to_string(spec.object_kind);
  j["noise_sigma"] = spec.noise_sigma;
  j["n_classes"] = spec.n_classes;
  j["slice_spacing_mm"] = spec.slice_spacing_mm;
  j["feature_mode"] = to_string(spec.features.mode);
  j["patch_size"] = spec.features.patch_size;
  j["positional_weight"] = spec.features.positional_weight;
  j["noise_channels"] = spec.features.noise_channels;
  j["write_features"] = spec.write_features;
  j["dicom"] = spec.write_dicom;
  if (spec.drop_slice) {
    j["drop_slice"] = *spec.drop_slice;
  } else {
    j["drop_slice"] = nullptr;
  }
  j["records"] = spec.records;
  return j;
}

std::string slice_file(const SliceKey& key, const char* ext) {
  return fmt::format("{}/{}/slice_{:04d}.{}", key.patient_id, key.series_id, key.slice_index, ext);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

ObjectKind parse_object_kind(const std::string& s) {
  if (s == "ellipse") return ObjectKind::kEllipse;
  if (s == "two_blobs") return ObjectKind::kTwoBlobs;
  if (s == "ramp") return ObjectKind::kRamp;
  if (s == "constant") return ObjectKind::kConstant;
  fail(ErrorCode::kValidation, "unknown object_kind '" + s + "'");
}

FeatureMode parse_feature_mode(const std::string& s) {
  if (s == "onehot_oracle") return FeatureMode::kOneHotOracle;
  if (s == "intensity_positional") return FeatureMode::kIntensityPositional;
  if (s == "noise") return FeatureMode::kNoise;
  fail(ErrorCode::kValidation, "unknown feature_mode '" + s + "'");
}

std::string to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::kEllipse: return "ellipse";
    case ObjectKind::kTwoBlobs: return "two_blobs";
    case ObjectKind::kRamp: return "ramp";
    case ObjectKind::kConstant: return "constant";
  }
  return "?";
}

std::string to_string(FeatureMode mode) {
  switch (mode) {
    case FeatureMode::kOneHotOracle: return "onehot_oracle";
    case FeatureMode::kIntensityPositional: return "intensity_positional";
    case FeatureMode::kNoise: return "noise";
  }
  return "?";
}

void FeatureOptions::validate() const {
  if (patch_size < 1) fail(ErrorCode::kValidation, "patch_size must be positive");
  if (noise_channels < 1) fail(ErrorCode::kValidation, "noise_channels must be positive");
  if (!(positional_weight >= 0.0) || !std::isfinite(positional_weight)) {
    fail(ErrorCode::kValidation, "positional_weight must be finite and non-negative");
  }
}

void SynthSpec::validate() const {
  if (image_h < 8 || image_w < 8) fail(ErrorCode::kValidation, "image_size must be at least 8x8");
  if (image_h > 4096 || image_w > 4096) fail(ErrorCode::kValidation, "image_size too large");
  if (n_volumes < 1) fail(ErrorCode::kValidation, "n_volumes must be positive");
  if (slices_per_volume < 2) fail(ErrorCode::kValidation, "slices_per_volume must be at least 2");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    fail(ErrorCode::kValidation, "noise_sigma must be finite and non-negative");
  }
  if (n_classes < 1) fail(ErrorCode::kValidation, "n_classes must be positive");
  if (!(slice_spacing_mm > 0.0)) fail(ErrorCode::kValidation, "slice_spacing_mm must be positive");
  features.validate();
  if (write_features && (image_h % static_cast<std::size_t>(features.patch_size) != 0 ||
                         image_w % static_cast<std::size_t>(features.patch_size) != 0)) {
    fail(ErrorCode::kValidation, "image_size must be a multiple of patch_size");
  }
  if (drop_slice && *drop_slice >= slices_per_volume) {
    fail(ErrorCode::kValidation, "drop_slice outside the volume");
  }
}

SynthSpec parse_synth_spec(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kParse, std::string("synth spec: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kValidation, "synth spec must be a JSON object");
  SynthSpec s;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "seed") s.seed = v.get<std::uint64_t>();
      else if (key == "image_size") {
        if (!v.is_array() || v.size() != 2) fail(ErrorCode::kValidation, "image_size must be [H, W]");
        s.image_h = v[0].get<std::size_t>();
        s.image_w = v[1].get<std::size_t>();
      } else if (key == "n_volumes") s.n_volumes = v.get<std::size_t>();
      else if (key == "slices_per_volume") s.slices_per_volume = v.get<std::size_t>();
      else if (key == "object_kind") s.object_kind = parse_object_kind(v.get<std::string>());
      else if (key == "noise_sigma") s.noise_sigma = v.get<double>();
      else if (key == "n_classes") s.n_classes = v.get<int>();
      else if (key == "slice_spacing_mm") s.slice_spacing_mm = v.get<double>();
      else if (key == "feature_mode") s.features.mode = parse_feature_mode(v.get<std::string>());
      else if (key == "patch_size") s.features.patch_size = v.get<int>();
      else if (key == "positional_weight") s.features.positional_weight = v.get<double>();
      else if (key == "noise_channels") s.features.noise_channels = v.get<int>();
      else if (key == "write_features") s.write_features = v.get<bool>();
      else if (key == "dicom") s.write_dicom = v.get<bool>();
      else if (key == "drop_slice") {
        if (!v.is_null()) s.drop_slice = v.get<std::size_t>();
      } else if (key == "records") s.records = v.get<std::size_t>();
      else fail(ErrorCode::kValidation, "unknown synth spec key '" + key + "'");
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kValidation, std::string("synth spec: ") + e.what());
  }
  s.features.seed = s.seed;
  s.validate();
  return s;
}

SynthSpec load_synth_spec(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_synth_spec(ss.str());
}

std::string synth_spec_json(const SynthSpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

std::string synth_series_uid(std::uint64_t seed, std::size_t volume) {
  return fmt::format("{}.{}.{}", kUidRoot, seed, volume + 1);
}

std::vector<SynthVolume> render_dataset(const SynthSpec& spec) {
  spec.validate();
  Rng master(spec.seed);
  const std::size_t h = spec.image_h, w = spec.image_w, d = spec.slices_per_volume;
  std::vector<SynthVolume> volumes(spec.n_volumes);
  for (std::size_t v = 0; v < spec.n_volumes; ++v) {
    Rng rng(master.next_u64());
    SynthVolume& vol = volumes[v];
    vol.patient_id = fmt::format("P{:03d}", v);
    vol.series_id = synth_series_uid(spec.seed, v);
    const Shape shape = draw_shape(spec, rng);
    for (std::size_t z = 0; z < d; ++z) {
      const double scale = 0.6 + 0.4 * std::sin(std::numbers::pi * (static_cast<double>(z) + 0.5) /
                                                static_cast<double>(d));
      SynthSlice s;
      s.key = {vol.patient_id, vol.series_id, static_cast<int>(z)};
      s.image = NdArray<float>({h, w});
      s.mask = LabelMask(NdArray<std::uint16_t>({h, w}));
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          const bool fg = inside(shape, spec.object_kind, scale, static_cast<double>(y) + 0.5,
                                 static_cast<double>(x) + 0.5);
          double value = 0.5;
          if (spec.object_kind == ObjectKind::kRamp) {
            value = 0.2 + 0.6 * static_cast<double>(x) / static_cast<double>(w - 1) + (fg ? 0.1 : 0.0);
          } else if (spec.object_kind != ObjectKind::kConstant) {
            value = fg ? shape.foreground : shape.background;
          }
          if (spec.object_kind != ObjectKind::kConstant && spec.noise_sigma > 0.0) {
            value += rng.normal(0.0, spec.noise_sigma);
          }
          s.image(y, x) = quantize_to_unit(value);
          s.mask.labels(y, x) = fg ? 1 : 0;
        }
      }
      vol.slices.push_back(std::move(s));
    }
  }

  // Class labels: slices ranked by object area (ties by key), cut into
  // n_classes groups of near-equal size.
  std::vector<SynthSlice*> all;
  for (auto& vol : volumes) {
    for (auto& s : vol.slices) all.push_back(&s);
  }
  std::stable_sort(all.begin(), all.end(), [](const SynthSlice* a, const SynthSlice* b) {
    return a->mask.count_nonzero() < b->mask.count_nonzero();
  });
  for (std::size_t i = 0; i < all.size(); ++i) {
    all[i]->class_label = static_cast<int>(i * static_cast<std::size_t>(spec.n_classes) / all.size());
  }
  return volumes;
}

Manifest write_dataset(const std::vector<SynthVolume>& volumes, const SynthSpec& spec,
                       const fs::path& out_dir, const std::string& name) {
  Manifest m;
  m.dataset_name = name;
  m.base_dir = out_dir;
  for (const auto& vol : volumes) {
    fs::create_directories(out_dir / "images" / vol.patient_id / vol.series_id);
    fs::create_directories(out_dir / "masks" / vol.patient_id / vol.series_id);
    for (const auto& s : vol.slices) {
      NdArray<std::uint8_t> img({spec.image_h, spec.image_w});
      for (std::size_t i = 0; i < img.size(); ++i) {
        img.data()[i] = static_cast<std::uint8_t>(std::lround(s.image.data()[i] * 255.0f));
      }
      ManifestEntry e;
      e.patient_id = s.key.patient_id;
      e.series_id = s.key.series_id;
      e.slice_index = s.key.slice_index;
      e.image_path = "images/" + slice_file(s.key, "png");
      e.mask_path = "masks/" + slice_file(s.key, "png");
      e.class_label = std::to_string(s.class_label);
      e.attributes["object_kind"] = to_string(spec.object_kind);
      save_gray_png(img, out_dir / e.image_path);
      save_mask_png(s.mask, out_dir / *e.mask_path);
      m.entries.push_back(std::move(e));
    }
  }
  save_manifest(m, out_dir / "manifest.jsonl");
  return m;
}

FeatureMap make_feature_map(const NdArray<float>& image, const LabelMask* mask,
                            const FeatureOptions& opts, std::uint64_t stream,
                            const std::string& slice_ref) {
  opts.validate();
  if (image.rank() != 2) fail(ErrorCode::kDimension, "feature proxies need a 2D image");
  const std::size_t h = image.dim(0), w = image.dim(1), p = static_cast<std::size_t>(opts.patch_size);
  if (h % p != 0 || w % p != 0) fail(ErrorCode::kDimension, "image size is not a multiple of patch_size");
  const std::size_t gh = h / p, gw = w / p;
  FeatureMap map;
  map.slice_ref = slice_ref;
  map.encoder_id = opts.encoder_id.empty() ? "synth-" + to_string(opts.mode) : opts.encoder_id;

  switch (opts.mode) {
    case FeatureMode::kOneHotOracle: {
      if (mask == nullptr) fail(ErrorCode::kValidation, "onehot_oracle features need a mask");
      if (mask->dims() != image.dims()) fail(ErrorCode::kDimension, "mask and image differ in size");
      std::size_t n_labels = 2;
      for (auto l : mask->labels.data()) n_labels = std::max<std::size_t>(n_labels, l + 1u);
      map.values = NdArray<float>({gh, gw, n_labels});
      std::vector<std::size_t> votes(n_labels);
      for (std::size_t gy = 0; gy < gh; ++gy) {
        for (std::size_t gx = 0; gx < gw; ++gx) {
          std::fill(votes.begin(), votes.end(), 0);
          for (std::size_t y = gy * p; y < (gy + 1) * p; ++y) {
            for (std::size_t x = gx * p; x < (gx + 1) * p; ++x) ++votes[mask->labels(y, x)];
          }
          const auto best = static_cast<std::size_t>(
              std::max_element(votes.begin(), votes.end()) - votes.begin());
          map.values(gy, gx, best) = 1.0f;
        }
      }
      break;
    }
    case FeatureMode::kIntensityPositional: {
      map.values = NdArray<float>({gh, gw, 4});
      const double n = static_cast<double>(p * p);
      for (std::size_t gy = 0; gy < gh; ++gy) {
        for (std::size_t gx = 0; gx < gw; ++gx) {
          double sum = 0.0, sq = 0.0;
          for (std::size_t y = gy * p; y < (gy + 1) * p; ++y) {
            for (std::size_t x = gx * p; x < (gx + 1) * p; ++x) {
              sum += image(y, x);
              sq += static_cast<double>(image(y, x)) * image(y, x);
            }
          }
          const double mean = sum / n;
          map.values(gy, gx, 0) = static_cast<float>(mean);
          map.values(gy, gx, 1) = static_cast<float>(opts.positional_weight * (gy + 0.5) / gh);
          map.values(gy, gx, 2) = static_cast<float>(opts.positional_weight * (gx + 0.5) / gw);
          map.values(gy, gx, 3) = static_cast<float>(std::max(0.0, sq / n - mean * mean));
        }
      }
      break;
    }
    case FeatureMode::kNoise: {
      const std::size_t c = static_cast<std::size_t>(opts.noise_channels);
      map.values = NdArray<float>({gh, gw, c});
      Rng rng(opts.seed ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
      for (float& v : map.values.data()) v = static_cast<float>(rng.normal());
      break;
    }
  }
  return map;
}

Manifest make_features(const Manifest& images, const Manifest* gt, const FeatureOptions& opts,
                       const fs::path& out_dir, std::size_t jobs) {
  opts.validate();
  Manifest out;
  out.dataset_name = images.dataset_name;
  out.base_dir = out_dir;
  out.entries.resize(images.entries.size());
  parallel_for(images.entries.size(), jobs, [&](std::size_t i) {
    const ManifestEntry& src = images.entries[i];
    ManifestEntry e = src;
    e.image_path = rebase_path(images, src.image_path, out_dir);
    if (src.mask_path) e.mask_path = rebase_path(images, *src.mask_path, out_dir);
    std::optional<LabelMask> mask;
    if (gt != nullptr) {
      const ManifestEntry* g = gt->find(src.key());
      if (g == nullptr || !g->mask_path) {
        fail(ErrorCode::kValidation, "no ground-truth mask for " + src.key().str());
      }
      e.mask_path = rebase_path(*gt, *g->mask_path, out_dir);
      if (!e.class_label) e.class_label = g->class_label;
      mask = load_mask_png(gt->resolve(*g->mask_path));
    } else if (src.mask_path) {
      mask = load_mask_png(images.resolve(*src.mask_path));
    }
    const NdArray<float> image = load_image_unit(images.resolve(src.image_path));
    const FeatureMap map = make_feature_map(image, mask ? &*mask : nullptr, opts, i, src.key().str());
    const std::string rel = "features/" + slice_file(src.key(), "fmap");
    fs::create_directories((out_dir / rel).parent_path());
    write_fmap(map, out_dir / rel);
    e.feature_path = rel;
    out.entries[i] = std::move(e);
  });
  save_manifest(out, out_dir / "features.jsonl");
  return out;
}

float synth_scanner_value(float unit) { return 100.0f + 900.0f * unit; }

fs::path make_dicom_series(const SynthSpec& spec, const SynthVolume& volume, const fs::path& out_dir,
                           const DicomOptions& opts) {
  namespace tags = dicom::tags;
  fs::create_directories(out_dir);
  const std::size_t h = spec.image_h, w = spec.image_w, d = volume.slices.size();
  if (opts.drop_slice && *opts.drop_slice >= d) fail(ErrorCode::kValidation, "drop_slice outside the volume");
  if (!(opts.rescale_slope > 0.0)) fail(ErrorCode::kValidation, "rescale slope must be positive");

  // File names follow a seeded permutation so directory order says nothing
  // about spatial order.
  std::vector<std::size_t> names(d + 1);
  std::iota(names.begin(), names.end(), 0);
  Rng rng(spec.seed ^ fnv1a(volume.series_id));
  rng.shuffle(std::span(names));

  auto base = [&](std::size_t instance) {
    dicom::Dataset ds;
    ds.set_string(tags::kSopClassUid, "UI", dicom::kMrImageStorage);
    ds.set_string(tags::kSopInstanceUid, "UI", fmt::format("{}.{}", volume.series_id, instance + 1));
    ds.set_string(tags::kModality, "CS", "MR");
    ds.set_string(tags::kManufacturer, "LO", "slicebench-synth");
    ds.set_string(tags::kSeriesDescription, "LO", "synthetic " + to_string(spec.object_kind));
    ds.set_string(tags::kPatientName, "PN", "Synthetic^" + volume.patient_id);
    ds.set_string(tags::kPatientId, "LO", volume.patient_id);
    ds.set_string(tags::kBodyPartExamined, "CS", "PHANTOM");
    ds.set_string(tags::kSliceThickness, "DS", fmt::format("{}", spec.slice_spacing_mm));
    ds.set_string(tags::kStudyInstanceUid, "UI", volume.series_id + ".0");
    ds.set_string(tags::kSeriesInstanceUid, "UI", volume.series_id);
    ds.set_string(tags::kInstanceNumber, "IS", std::to_string(instance + 1));
    ds.set_u16(tags::kSamplesPerPixel, 1);
    ds.set_string(tags::kPhotometricInterpretation, "CS", "MONOCHROME2");
    ds.set_u16(tags::kRows, static_cast<std::uint16_t>(h));
    ds.set_u16(tags::kColumns, static_cast<std::uint16_t>(w));
    ds.set_string(tags::kPixelSpacing, "DS", "1\\1");
    ds.set_u16(tags::kBitsAllocated, 16);
    ds.set_u16(tags::kBitsStored, 16);
    ds.set_u16(tags::kHighBit, 15);
    ds.set_u16(tags::kPixelRepresentation, 0);
    ds.set_string(tags::kRescaleIntercept, "DS", fmt::format("{}", opts.rescale_intercept));
    ds.set_string(tags::kRescaleSlope, "DS", fmt::format("{}", opts.rescale_slope));
    return ds;
  };
  auto pixels = [&](const NdArray<float>& img) {
    std::vector<std::uint8_t> bytes;
    bytes.reserve(img.size() * 2);
    for (float v : img.data()) {
      const double raw = std::round((synth_scanner_value(v) - opts.rescale_intercept) / opts.rescale_slope);
      const auto word = static_cast<std::uint16_t>(std::clamp(raw, 0.0, 65535.0));
      bytes.push_back(static_cast<std::uint8_t>(word));
      bytes.push_back(static_cast<std::uint8_t>(word >> 8));
    }
    return bytes;
  };

  const double x0 = -0.5 * static_cast<double>(w), y0 = -0.5 * static_cast<double>(h);
  for (std::size_t z = 0; z < d; ++z) {
    if (opts.drop_slice && *opts.drop_slice == z) continue;
    dicom::Dataset ds = base(z);
    ds.set_string(tags::kImagePositionPatient, "DS",
                  fmt::format("{}\\{}\\{}", x0, y0, static_cast<double>(z) * spec.slice_spacing_mm));
    ds.set_string(tags::kImageOrientationPatient, "DS", "1\\0\\0\\0\\1\\0");
    ds.set(tags::kPixelData, "OW", pixels(volume.slices[z].image));
    dicom::write_file(ds, out_dir / fmt::format("IM{:04d}.dcm", names[z]));
  }
  if (opts.add_reference_slice) {
    dicom::Dataset ds = base(d);
    ds.set_string(tags::kImagePositionPatient, "DS", fmt::format("0\\{}\\0", y0));
    ds.set_string(tags::kImageOrientationPatient, "DS", "0\\1\\0\\0\\0\\-1");
    ds.set(tags::kPixelData, "OW", pixels(volume.slices[d / 2].image));
    dicom::write_file(ds, out_dir / fmt::format("IM{:04d}.dcm", names[d]));
  }
  return out_dir;
}

std::vector<CorrelationRecord> make_records(std::size_t n, std::uint64_t seed, double slope,
                                            double noise_sigma) {
  Rng rng(seed);
  std::vector<CorrelationRecord> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].dataset = fmt::format("synthetic_{:02d}", i);
    out[i].frd_fsl = rng.uniform(1.0, 10.0);
    out[i].frd_test = out[i].frd_fsl + rng.normal(0.0, 0.5);
    out[i].delta = slope * out[i].frd_fsl + rng.normal(0.0, noise_sigma);
  }
  return out;
}

SynthOutputs run_synth(const SynthSpec& spec, const fs::path& out_dir, std::size_t jobs) {
  spec.validate();
  fs::create_directories(out_dir);
  {
    std::ofstream f(out_dir / "spec.json", std::ios::trunc);
    if (!f) fail(ErrorCode::kIo, "cannot write " + (out_dir / "spec.json").string());
    f << synth_spec_json(spec);
  }
  const auto volumes = render_dataset(spec);
  SynthOutputs out;
  out.dataset = write_dataset(volumes, spec, out_dir);
  if (spec.write_features) {
    FeatureOptions opts = spec.features;
    opts.seed = spec.seed;
    out.features = make_features(out.dataset, nullptr, opts, out_dir, jobs);
  }
  if (spec.write_dicom) {
    for (std::size_t v = 0; v < volumes.size(); ++v) {
      DicomOptions opts;
      if (v == 0) opts.drop_slice = spec.drop_slice;
      out.dicom_dirs.push_back(
          make_dicom_series(spec, volumes[v], out_dir / "dicom" / volumes[v].patient_id, opts));
    }
  }
  if (spec.records > 0) {
    out.records = out_dir / "records.jsonl";
    save_records(make_records(spec.records, spec.seed), *out.records);
  }
  return out;
}

}  // namespace slicebench
