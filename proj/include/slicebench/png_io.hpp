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

#include "slicebench/tensor.hpp"

namespace slicebench {

// Only 8-bit single-channel grayscale PNGs are accepted or produced. Pixel
// values are stored verbatim; for masks a pixel value is a label id.

NdArray<std::uint8_t> load_gray_png(const std::filesystem::path& path);
void save_gray_png(const NdArray<std::uint8_t>& image,
                   const std::filesystem::path& path);

LabelMask load_mask_png(const std::filesystem::path& path);

/// Throws kLabel when a label does not fit in 8 bits.
void save_mask_png(const LabelMask& mask, const std::filesystem::path& path);

/// Loads an 8-bit grayscale PNG as floats in [0, 1] (value / 255).
NdArray<float> load_image_unit(const std::filesystem::path& path);

}  // namespace slicebench
