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

#include <stdexcept>
#include <string>
#include <string_view>

namespace slicebench {

enum class ErrorCode {
  kValidation,     // malformed or non-finite input values
  kFormat,         // wrong magic, unsupported encoding
  kLength,         // truncated payload
  kIo,             // read/write failure
  kParse,          // unreadable structured input (DICOM, JSON)
  kMixedSeries,
  kDuplicate,
  kDimension,      // shape mismatch
  kLabel,          // label outside the admissible set
  kEmptyGroundTruth,
  kSize,           // too few samples / points for the operation
  kNumericDomain,  // asymmetric or indefinite matrices, negative distances
  kCoverage,       // a class is missing from the training split
  kDivergence,     // non-finite training loss
  kDegenerate,     // zero-variance input to a correlation
  kInsufficient,   // not enough eligible slices
  kEmptySelection,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; `code()` says what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for errors caused by bad inputs rather than by the environment or
  /// by numerics. The CLI maps these to exit status 1.
  bool is_validation() const noexcept;

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace slicebench
