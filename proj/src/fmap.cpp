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

#include "slicebench/fmap.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

namespace slicebench {
namespace {

constexpr char kMagic[4] = {'F', 'M', 'A', 'P'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

template <typename T>
void put_payload(std::vector<std::uint8_t>& out, const NdArray<T>& a) {
  for (T v : a.data()) {
    if constexpr (std::is_same_v<T, float>) {
      put_u32(out, std::bit_cast<std::uint32_t>(v));
    } else if constexpr (std::is_same_v<T, std::uint16_t>) {
      out.push_back(static_cast<std::uint8_t>(v));
      out.push_back(static_cast<std::uint8_t>(v >> 8));
    } else {
      out.push_back(v);
    }
  }
}

template <typename T>
NdArray<T> get_payload(std::span<const std::uint8_t> b, std::size_t at, Dims dims,
                       std::size_t count) {
  std::vector<T> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    if constexpr (std::is_same_v<T, float>) {
      data[i] = std::bit_cast<float>(get_u32(b, at + 4 * i));
    } else if constexpr (std::is_same_v<T, std::uint16_t>) {
      data[i] = static_cast<std::uint16_t>(b[at + 2 * i] | (b[at + 2 * i + 1] << 8));
    } else {
      data[i] = b[at + i];
    }
  }
  return NdArray<T>(std::move(dims), std::move(data));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace

std::size_t fmap_header_size(std::size_t rank) { return 12 + 4 * rank; }

std::vector<std::uint8_t> encode_tensor(const Tensor& tensor) {
  std::vector<std::uint8_t> out;
  std::visit(
      [&](const auto& a) {
        using T = typename std::decay_t<decltype(a)>::value_type;
        if (a.rank() == 0) fail(ErrorCode::kValidation, "cannot encode an empty tensor");
        out.reserve(fmap_header_size(a.rank()) + a.size() * sizeof(T));
        out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
        out.push_back(kFmapVersion);
        out.push_back(static_cast<std::uint8_t>(DTypeOf<T>::value));
        out.push_back(0);
        out.push_back(0);
        put_u32(out, static_cast<std::uint32_t>(a.rank()));
        for (std::size_t d : a.dims()) put_u32(out, static_cast<std::uint32_t>(d));
        put_payload(out, a);
      },
      tensor);
  return out;
}

Tensor decode_tensor(std::span<const std::uint8_t> b) {
  if (b.size() < 4 || std::memcmp(b.data(), kMagic, 4) != 0) {
    fail(ErrorCode::kFormat, "bad FMAP magic");
  }
  if (b.size() < 12) fail(ErrorCode::kLength, "truncated FMAP header");
  if (b[4] != kFmapVersion) {
    fail(ErrorCode::kFormat, "unsupported FMAP version " + std::to_string(b[4]));
  }
  if (b[5] > 2) fail(ErrorCode::kFormat, "unknown FMAP dtype");
  if (b[6] != 0 || b[7] != 0) fail(ErrorCode::kFormat, "FMAP reserved bytes not zero");
  const auto dtype = static_cast<DType>(b[5]);
  const std::uint32_t rank = get_u32(b, 8);
  if (rank < 1 || rank > 4) fail(ErrorCode::kFormat, "FMAP rank out of range");
  const std::size_t header = fmap_header_size(rank);
  if (b.size() < header) fail(ErrorCode::kLength, "truncated FMAP dims");
  Dims dims(rank);
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    dims[i] = get_u32(b, 12 + 4 * i);
    if (dims[i] == 0) fail(ErrorCode::kFormat, "FMAP dimension is zero");
    count *= dims[i];
  }
  const std::size_t payload = count * dtype_size(dtype);
  if (b.size() - header < payload) fail(ErrorCode::kLength, "truncated FMAP payload");
  if (b.size() - header > payload) fail(ErrorCode::kLength, "trailing bytes after FMAP payload");
  switch (dtype) {
    case DType::kFloat32: return get_payload<float>(b, header, std::move(dims), count);
    case DType::kUInt8: return get_payload<std::uint8_t>(b, header, std::move(dims), count);
    case DType::kUInt16: return get_payload<std::uint16_t>(b, header, std::move(dims), count);
  }
  fail(ErrorCode::kFormat, "unknown FMAP dtype");
}

void write_tensor(const Tensor& tensor, const std::filesystem::path& path) {
  write_file(path, encode_tensor(tensor));
}

Tensor read_tensor(const std::filesystem::path& path) {
  return decode_tensor(read_file(path));
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

void write_fmap(const FeatureMap& map, const std::filesystem::path& path) {
  map.validate();
  write_tensor(map.values, path);
  nlohmann::ordered_json meta;
  meta["format"] = "FMAP";
  meta["version"] = kFmapVersion;
  meta["dtype"] = "float32";
  meta["slice_ref"] = map.slice_ref;
  meta["encoder_id"] = map.encoder_id;
  meta["grid"] = {map.grid_h(), map.grid_w()};
  meta["channels"] = map.channels();
  const std::string text = meta.dump(2) + "\n";
  write_file(sidecar_path(path),
             {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

FeatureMap read_fmap(const std::filesystem::path& path) {
  Tensor t = read_tensor(path);
  auto* values = std::get_if<NdArray<float>>(&t);
  if (values == nullptr) fail(ErrorCode::kFormat, "feature map payload must be float32");
  FeatureMap map{std::move(*values), "", ""};
  map.validate();
  const auto side = sidecar_path(path);
  if (std::filesystem::exists(side)) {
    nlohmann::json meta;
    try {
      std::ifstream in(side);
      meta = nlohmann::json::parse(in);
      map.slice_ref = meta.value("slice_ref", "");
      map.encoder_id = meta.value("encoder_id", "");
      if (meta.contains("grid")) {
        const auto grid = meta.at("grid").get<std::vector<std::size_t>>();
        if (grid.size() != 2 || grid[0] != map.grid_h() || grid[1] != map.grid_w() ||
            meta.value("channels", map.channels()) != map.channels()) {
          fail(ErrorCode::kFormat, "sidecar grid disagrees with FMAP header");
        }
      }
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::kParse, "bad sidecar " + side.string() + ": " + e.what());
    }
  }
  return map;
}

}  // namespace slicebench
