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

#include "slicebench/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace slicebench {

std::size_t dtype_size(DType dtype) {
  switch (dtype) {
    case DType::kFloat32: return 4;
    case DType::kUInt8: return 1;
    case DType::kUInt16: return 2;
  }
  fail(ErrorCode::kFormat, "unknown dtype");
}

void FeatureMap::validate() const {
  if (values.rank() != 3) {
    fail(ErrorCode::kDimension, "feature map must have dims {h, w, c}");
  }
  for (float v : values.data()) {
    if (!std::isfinite(v)) {
      fail(ErrorCode::kValidation, "feature map contains non-finite values");
    }
  }
}

std::size_t LabelMask::count_nonzero() const {
  return static_cast<std::size_t>(
      std::count_if(labels.data().begin(), labels.data().end(),
                    [](std::uint16_t v) { return v != 0; }));
}

bool LabelMask::is_binary() const {
  return std::all_of(labels.data().begin(), labels.data().end(),
                     [](std::uint16_t v) { return v <= 1; });
}

void LabelMask::validate() const {
  if (labels.rank() != 2 && labels.rank() != 3) {
    fail(ErrorCode::kDimension, "label mask must be 2D or 3D");
  }
  if (label_names.empty()) return;
  for (std::uint16_t v : labels.data()) {
    if (!label_names.contains(v)) {
      fail(ErrorCode::kLabel,
           "label " + std::to_string(v) + " is not declared in label_names");
    }
  }
}

LabelMask stack_slices(const std::vector<LabelMask>& slices) {
  if (slices.empty()) fail(ErrorCode::kSize, "no slices to stack");
  const Dims& first = slices.front().dims();
  if (first.size() != 2) fail(ErrorCode::kDimension, "slices must be 2D");
  std::vector<std::uint16_t> data;
  data.reserve(slices.size() * first[0] * first[1]);
  for (const auto& s : slices) {
    if (s.dims() != first) {
      fail(ErrorCode::kDimension, "slices have different dims");
    }
    data.insert(data.end(), s.labels.data().begin(), s.labels.data().end());
  }
  LabelMask out(NdArray<std::uint16_t>({slices.size(), first[0], first[1]},
                                       std::move(data)));
  out.label_names = slices.front().label_names;
  return out;
}

LabelMask slice_of(const LabelMask& volume, std::size_t z) {
  if (volume.labels.rank() != 3) {
    fail(ErrorCode::kDimension, "slice_of expects a 3D mask");
  }
  const std::size_t h = volume.dims()[1];
  const std::size_t w = volume.dims()[2];
  if (z >= volume.dims()[0]) fail(ErrorCode::kDimension, "slice out of range");
  auto begin = volume.labels.data().begin() + static_cast<std::ptrdiff_t>(z * h * w);
  LabelMask out(NdArray<std::uint16_t>(
      {h, w}, std::vector<std::uint16_t>(begin, begin + static_cast<std::ptrdiff_t>(h * w))));
  out.label_names = volume.label_names;
  return out;
}

}  // namespace slicebench
