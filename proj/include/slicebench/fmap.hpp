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
#include <span>
#include <vector>

#include "slicebench/tensor.hpp"

namespace slicebench {

/// FMAP container, little-endian regardless of host:
///
///   offset  size      field
///   0       4         magic "FMAP"
///   4       1         version (1)
///   5       1         dtype (0 float32, 1 uint8, 2 uint16)
///   6       2         reserved, zero
///   8       4         rank r (uint32)
///   12      4*r       dims (uint32 each), outermost first
///   12+4r   ...       row-major payload
///
/// A rank-3 float map therefore has a 24-byte header.
inline constexpr std::uint8_t kFmapVersion = 1;

std::size_t fmap_header_size(std::size_t rank);

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor);
Tensor decode_tensor(std::span<const std::uint8_t> bytes);

void write_tensor(const Tensor& tensor, const std::filesystem::path& path);
Tensor read_tensor(const std::filesystem::path& path);

/// Writes the FMAP file plus a `<path>.json` sidecar carrying slice_ref,
/// encoder_id, grid and channels.
void write_fmap(const FeatureMap& map, const std::filesystem::path& path);

/// Reads an FMAP written by write_fmap. Rejects non-float payloads and
/// sidecars whose grid disagrees with the header.
FeatureMap read_fmap(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace slicebench
