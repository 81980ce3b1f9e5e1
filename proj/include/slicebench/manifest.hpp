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

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace slicebench {

struct SliceKey {
  std::string patient_id;
  std::string series_id;
  int slice_index = 0;

  auto operator<=>(const SliceKey&) const = default;
  std::string str() const;
};

struct ManifestEntry {
  std::string patient_id;
  std::string series_id;
  int slice_index = 0;
  std::string image_path;
  std::optional<std::string> mask_path;
  std::optional<std::string> feature_path;
  std::optional<std::string> class_label;
  /// Any additional string-valued keys (de-identified DICOM attributes,
  /// intensity ranges, alternative label keys).
  std::map<std::string, std::string> attributes;

  SliceKey key() const { return {patient_id, series_id, slice_index}; }

  /// Looks up `class_label` or an attribute by name.
  std::optional<std::string> field(const std::string& name) const;
};

/// JSON-lines manifest. The first line may be a header object
/// `{"dataset_name": ...}`; every other line is one entry. Relative paths
/// resolve against the directory holding the manifest file.
struct Manifest {
  std::string dataset_name;
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& path) const;

  /// Throws kDuplicate on a repeated (patient, series, slice) key and
  /// kValidation on an ill-formed path.
  void validate() const;

  /// Distinct patient ids in sorted order.
  std::vector<std::string> patients() const;

  /// Entry lookup by key; nullptr when absent.
  const ManifestEntry* find(const SliceKey& key) const;
};

/// `path` (relative to `from`) re-expressed relative to `to_dir`.
std::string rebase_path(const Manifest& from, const std::string& path,
                        const std::filesystem::path& to_dir);

Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Keeps at most one series per patient (the lexicographically first) and at
/// most `max_exams` series overall, chosen by a seeded shuffle of patients.
Manifest sample_exams(const Manifest& manifest, std::size_t max_exams,
                      std::uint64_t seed);

}  // namespace slicebench
