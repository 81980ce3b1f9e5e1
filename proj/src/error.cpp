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

#include "slicebench/error.hpp"

namespace slicebench {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kLength: return "length";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kMixedSeries: return "mixed-series";
    case ErrorCode::kDuplicate: return "duplicate";
    case ErrorCode::kDimension: return "dimension";
    case ErrorCode::kLabel: return "label";
    case ErrorCode::kEmptyGroundTruth: return "empty-gt";
    case ErrorCode::kSize: return "size";
    case ErrorCode::kNumericDomain: return "numeric-domain";
    case ErrorCode::kCoverage: return "coverage";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kInsufficient: return "insufficient";
    case ErrorCode::kEmptySelection: return "empty-selection";
  }
  return "unknown";
}

bool Error::is_validation() const noexcept {
  switch (code_) {
    case ErrorCode::kIo:
    case ErrorCode::kNumericDomain:
    case ErrorCode::kDivergence:
      return false;
    default:
      return true;
  }
}

}  // namespace slicebench
