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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slicebench/manifest.hpp"
#include "slicebench/metrics.hpp"

namespace slicebench {

struct SplitPlan {
  std::vector<std::string> names;             // "train", "val", "test"
  std::vector<std::vector<SliceKey>> parts;   // one per ratio
  std::vector<double> ratios;
  std::uint64_t seed = 0;

  /// Entries of `manifest` that belong to part i, in manifest order.
  Manifest subset(const Manifest& manifest, std::size_t part) const;
};

/// Patient-level split. Patients are shuffled by the seeded stream, then each
/// is placed in a split that is still below its slice-count target; with a
/// stratify key the split whose per-label deficit best matches the
/// patient's label histogram wins. Every split therefore overshoots its
/// target by less than one patient's slice count.
SplitPlan patient_split(const Manifest& manifest, std::span<const double> ratios,
                        std::uint64_t seed,
                        const std::optional<std::string>& stratify_key = std::nullopt);

struct FewShotSample {
  std::vector<SliceKey> train_slices;  // 5
  std::vector<SliceKey> val_slices;    // 5
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kFewShotTrain = 5;
inline constexpr std::size_t kFewShotVal = 5;

using Eligibility = std::function<bool(const ManifestEntry&)>;

/// Entry has a mask_path whose PNG contains a non-zero pixel.
Eligibility nonempty_mask(const Manifest& manifest);

/// Draws 5 + 5 distinct eligible slices without replacement, cycling over
/// patients in seeded order so the draw spreads across patients. Throws
/// kInsufficient with fewer than 10 eligible slices.
FewShotSample fewshot_sample(const Manifest& pool, std::uint64_t seed, const Eligibility& eligible);
FewShotSample fewshot_sample(const Manifest& pool, std::uint64_t seed);

struct RepeatOutcome {
  std::vector<MetricReport> runs;
  /// Across-run statistics of each run's mean metric.
  Summary dsc2d;
  Summary dsc3d;
  Summary nsd3d;
};

using FewShotTask = std::function<MetricReport(const FewShotSample&)>;

/// Samples once per seed, runs the task, aggregates across runs.
RepeatOutcome repeat_protocol(const Manifest& pool, std::span<const std::uint64_t> seeds,
                              const FewShotTask& task, const Eligibility& eligible);

}  // namespace slicebench
