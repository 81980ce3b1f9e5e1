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

#include "slicebench/png_io.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include <png.h>

namespace slicebench {
namespace {

struct PngHeader {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  int bit_depth = 0;
  int color_type = 0;
};

// Reads IHDR directly; the simplified libpng API hides the source bit depth.
PngHeader read_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::array<unsigned char, 26> b{};
  in.read(reinterpret_cast<char*>(b.data()), b.size());
  static constexpr unsigned char kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (in.gcount() != static_cast<std::streamsize>(b.size()) ||
      std::memcmp(b.data(), kSig, 8) != 0 || std::memcmp(b.data() + 12, "IHDR", 4) != 0) {
    fail(ErrorCode::kFormat, path.string() + " is not a PNG file");
  }
  auto be32 = [&](std::size_t at) {
    return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
           (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
  };
  return {be32(16), be32(20), b[24], b[25]};
}

}  // namespace

NdArray<std::uint8_t> load_gray_png(const std::filesystem::path& path) {
  const PngHeader header = read_header(path);
  if (header.color_type != PNG_COLOR_TYPE_GRAY) {
    fail(ErrorCode::kFormat, path.string() + " is not single-channel grayscale");
  }
  if (header.bit_depth != 8) {
    fail(ErrorCode::kFormat, path.string() + " is not 8-bit (depth " +
                                 std::to_string(header.bit_depth) + ")");
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    fail(ErrorCode::kFormat, "libpng: " + std::string(image.message));
  }
  image.format = PNG_FORMAT_GRAY;
  NdArray<std::uint8_t> out({image.height, image.width});
  if (!png_image_finish_read(&image, nullptr, out.data().data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    fail(ErrorCode::kFormat, "libpng: " + msg);
  }
  return out;
}

void save_gray_png(const NdArray<std::uint8_t>& img, const std::filesystem::path& path) {
  if (img.rank() != 2) fail(ErrorCode::kDimension, "PNG export needs a 2D array");
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.dim(1));
  image.height = static_cast<png_uint_32>(img.dim(0));
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.data().data(), 0, nullptr)) {
    fail(ErrorCode::kIo, "cannot write " + path.string() + ": " + image.message);
  }
}

LabelMask load_mask_png(const std::filesystem::path& path) {
  const auto raw = load_gray_png(path);
  std::vector<std::uint16_t> labels(raw.data().begin(), raw.data().end());
  return LabelMask(NdArray<std::uint16_t>(raw.dims(), std::move(labels)));
}

void save_mask_png(const LabelMask& mask, const std::filesystem::path& path) {
  mask.validate();
  if (mask.labels.rank() != 2) fail(ErrorCode::kDimension, "mask PNG must be 2D");
  std::vector<std::uint8_t> bytes(mask.labels.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const std::uint16_t v = mask.labels[i];
    if (v > 255) fail(ErrorCode::kLabel, "label exceeds 8 bits");
    bytes[i] = static_cast<std::uint8_t>(v);
  }
  save_gray_png(NdArray<std::uint8_t>(mask.dims(), std::move(bytes)), path);
}

NdArray<float> load_image_unit(const std::filesystem::path& path) {
  const auto raw = load_gray_png(path);
  std::vector<float> v(raw.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(raw[i]) / 255.0f;
  return NdArray<float>(raw.dims(), std::move(v));
}

}  // namespace slicebench
