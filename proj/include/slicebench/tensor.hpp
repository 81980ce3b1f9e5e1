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

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "slicebench/error.hpp"

namespace slicebench {

enum class DType : std::uint8_t { kFloat32 = 0, kUInt8 = 1, kUInt16 = 2 };

template <typename T>
struct DTypeOf;
template <>
struct DTypeOf<float> { static constexpr DType value = DType::kFloat32; };
template <>
struct DTypeOf<std::uint8_t> { static constexpr DType value = DType::kUInt8; };
template <>
struct DTypeOf<std::uint16_t> { static constexpr DType value = DType::kUInt16; };

std::size_t dtype_size(DType dtype);

using Dims = std::vector<std::size_t>;

/// Dense row-major array of rank 1 to 4 with no zero-length dimension.
/// A default-constructed array is empty (rank 0) and only serves as a
/// placeholder to be assigned into.
template <typename T>
class NdArray {
 public:
  using value_type = T;

  NdArray() = default;

  explicit NdArray(Dims dims, T fill = T{}) : dims_(std::move(dims)) {
    data_.assign(checked_product(dims_), fill);
  }

  NdArray(Dims dims, std::vector<T> data)
      : dims_(std::move(dims)), data_(std::move(data)) {
    if (checked_product(dims_) != data_.size()) {
      fail(ErrorCode::kDimension, "array data length does not match dims");
    }
  }

  const Dims& dims() const { return dims_; }
  std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
  std::size_t rank() const { return dims_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  const std::vector<T>& vec() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& operator()(std::size_t i, std::size_t j) {
    return data_[i * dims_[1] + j];
  }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * dims_[1] + j];
  }
  T& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }

  friend bool operator==(const NdArray&, const NdArray&) = default;

 private:
  static std::size_t checked_product(const Dims& dims) {
    if (dims.empty() || dims.size() > 4) {
      fail(ErrorCode::kDimension, "array rank must be between 1 and 4");
    }
    std::size_t n = 1;
    for (std::size_t d : dims) {
      if (d == 0) fail(ErrorCode::kDimension, "array dimension is zero");
      n *= d;
    }
    return n;
  }

  Dims dims_;
  std::vector<T> data_;
};

using Tensor = std::variant<NdArray<float>, NdArray<std::uint8_t>,
                            NdArray<std::uint16_t>>;

/// Patch-embedding grid for one slice: values has dims {grid_h, grid_w, c}.
struct FeatureMap {
  NdArray<float> values;
  std::string slice_ref;
  std::string encoder_id;

  std::size_t grid_h() const { return values.dim(0); }
  std::size_t grid_w() const { return values.dim(1); }
  std::size_t channels() const { return values.dim(2); }

  /// Throws kDimension for a non rank-3 tensor, kValidation for non-finite
  /// values.
  void validate() const;

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;
};

/// Integer label image, dims {H, W} or {D, H, W}.
struct LabelMask {
  NdArray<std::uint16_t> labels;
  std::map<std::uint16_t, std::string> label_names;

  LabelMask() = default;
  explicit LabelMask(NdArray<std::uint16_t> l) : labels(std::move(l)) {}

  const Dims& dims() const { return labels.dims(); }
  std::size_t count_nonzero() const;
  bool is_binary() const;

  /// Checks rank and, when label_names is non-empty, that every label is
  /// declared there.
  void validate() const;

  friend bool operator==(const LabelMask&, const LabelMask&) = default;
};

/// Stacks equally sized 2D masks into a {D, H, W} mask.
LabelMask stack_slices(const std::vector<LabelMask>& slices);

/// The z-th {H, W} slice of a {D, H, W} mask.
LabelMask slice_of(const LabelMask& volume, std::size_t z);

}  // namespace slicebench
