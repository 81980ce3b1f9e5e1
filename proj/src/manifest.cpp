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

#include "slicebench/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "slicebench/error.hpp"
#include "slicebench/rng.hpp"

namespace slicebench {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string scalar_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float() || v.is_boolean()) return v.dump();
  fail(ErrorCode::kParse, "manifest values must be scalars");
}

bool well_formed_path(const std::string& p) {
  return !p.empty() && p.find('\0') == std::string::npos &&
         p.find('\n') == std::string::npos;
}

}  // namespace

std::string SliceKey::str() const {
  return patient_id + "/" + series_id + "/" + std::to_string(slice_index);
}

std::optional<std::string> ManifestEntry::field(const std::string& name) const {
  if (name == "class_label") return class_label;
  auto it = attributes.find(name);
  if (it == attributes.end()) return std::nullopt;
  return it->second;
}

std::filesystem::path Manifest::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

std::string rebase_path(const Manifest& from, const std::string& path,
                        const std::filesystem::path& to_dir) {
  namespace fs = std::filesystem;
  const fs::path abs = fs::absolute(from.resolve(path)).lexically_normal();
  return abs.lexically_relative(fs::absolute(to_dir).lexically_normal()).generic_string();
}

void Manifest::validate() const {
  std::set<SliceKey> seen;
  for (const auto& e : entries) {
    if (!seen.insert(e.key()).second) {
      fail(ErrorCode::kDuplicate, "duplicate manifest key " + e.key().str());
    }
    if (e.patient_id.empty()) fail(ErrorCode::kValidation, "empty patient_id");
    for (const auto* p : {&e.image_path}) {
      if (!well_formed_path(*p)) {
        fail(ErrorCode::kValidation, "ill-formed image_path for " + e.key().str());
      }
    }
    for (const auto& p : {e.mask_path, e.feature_path}) {
      if (p && !well_formed_path(*p)) {
        fail(ErrorCode::kValidation, "ill-formed path for " + e.key().str());
      }
    }
  }
}

std::vector<std::string> Manifest::patients() const {
  std::set<std::string> ids;
  for (const auto& e : entries) ids.insert(e.patient_id);
  return {ids.begin(), ids.end()};
}

const ManifestEntry* Manifest::find(const SliceKey& key) const {
  for (const auto& e : entries) {
    if (e.patient_id == key.patient_id && e.series_id == key.series_id &&
        e.slice_index == key.slice_index) {
      return &e;
    }
  }
  return nullptr;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open manifest " + path.string());
  Manifest m;
  m.base_dir = path.parent_path();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.is_object()) {
      fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": not an object");
    }
    if (!obj.contains("patient_id")) {
      if (obj.contains("dataset_name") && m.entries.empty()) {
        m.dataset_name = obj.at("dataset_name").get<std::string>();
        continue;
      }
      fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": missing patient_id");
    }
    ManifestEntry e;
    try {
      for (const auto& [k, v] : obj.items()) {
        if (k == "patient_id") e.patient_id = scalar_to_string(v);
        else if (k == "series_id") e.series_id = scalar_to_string(v);
        else if (k == "slice_index") e.slice_index = v.get<int>();
        else if (k == "image_path") e.image_path = v.get<std::string>();
        else if (k == "mask_path") e.mask_path = v.get<std::string>();
        else if (k == "feature_path") e.feature_path = v.get<std::string>();
        else if (k == "class_label") e.class_label = scalar_to_string(v);
        else e.attributes[k] = scalar_to_string(v);
      }
    } catch (const json::exception& ex) {
      fail(ErrorCode::kParse, path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
    m.entries.push_back(std::move(e));
  }
  m.validate();
  return m;
}

void save_manifest(const Manifest& m, const std::filesystem::path& path) {
  m.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write manifest " + path.string());
  if (!m.dataset_name.empty()) {
    ordered_json header;
    header["dataset_name"] = m.dataset_name;
    out << header.dump() << '\n';
  }
  for (const auto& e : m.entries) {
    ordered_json obj;
    obj["patient_id"] = e.patient_id;
    obj["series_id"] = e.series_id;
    obj["slice_index"] = e.slice_index;
    obj["image_path"] = e.image_path;
    if (e.mask_path) obj["mask_path"] = *e.mask_path;
    if (e.feature_path) obj["feature_path"] = *e.feature_path;
    if (e.class_label) obj["class_label"] = *e.class_label;
    for (const auto& [k, v] : e.attributes) obj[k] = v;
    out << obj.dump() << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

Manifest sample_exams(const Manifest& manifest, std::size_t max_exams, std::uint64_t seed) {
  std::map<std::string, std::string> first_series;
  for (const auto& e : manifest.entries) {
    auto [it, inserted] = first_series.emplace(e.patient_id, e.series_id);
    if (!inserted && e.series_id < it->second) it->second = e.series_id;
  }
  std::vector<std::string> patients;
  for (const auto& [p, s] : first_series) patients.push_back(p);
  Rng rng(seed);
  rng.shuffle(std::span(patients));
  if (patients.size() > max_exams) patients.resize(max_exams);
  std::set<std::string> keep(patients.begin(), patients.end());

  Manifest out;
  out.dataset_name = manifest.dataset_name;
  out.base_dir = manifest.base_dir;
  for (const auto& e : manifest.entries) {
    if (keep.contains(e.patient_id) && first_series.at(e.patient_id) == e.series_id) {
      out.entries.push_back(e);
    }
  }
  return out;
}

}  // namespace slicebench
