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

#include "slicebench/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "slicebench/png_io.hpp"
#include "slicebench/rng.hpp"

namespace slicebench {

Manifest SplitPlan::subset(const Manifest& manifest, std::size_t part) const {
  const std::set<SliceKey> keys(parts.at(part).begin(), parts.at(part).end());
  Manifest out;
  out.dataset_name = manifest.dataset_name;
  out.base_dir = manifest.base_dir;
  for (const auto& e : manifest.entries) {
    if (keys.contains(e.key())) out.entries.push_back(e);
  }
  return out;
}

SplitPlan patient_split(const Manifest& manifest, std::span<const double> ratios,
                        std::uint64_t seed, const std::optional<std::string>& stratify_key) {
  if (ratios.empty()) fail(ErrorCode::kValidation, "no split ratios given");
  double total_ratio = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) fail(ErrorCode::kValidation, "split ratios must be positive");
    total_ratio += r;
  }
  if (std::abs(total_ratio - 1.0) > 1e-9) fail(ErrorCode::kValidation, "split ratios must sum to 1");

  // Patient -> slices and label histogram.
  std::map<std::string, std::vector<SliceKey>> slices;
  std::map<std::string, std::map<std::string, double>> labels;
  std::map<std::string, double> label_totals;
  for (const auto& e : manifest.entries) {
    slices[e.patient_id].push_back(e.key());
    if (stratify_key) {
      const std::string label = e.field(*stratify_key).value_or("");
      labels[e.patient_id][label] += 1.0;
      label_totals[label] += 1.0;
    }
  }
  const std::size_t n_splits = ratios.size();
  if (slices.size() < n_splits) {
    fail(ErrorCode::kSize, "fewer patients (" + std::to_string(slices.size()) + ") than splits");
  }

  std::vector<std::string> patients;
  for (const auto& [p, s] : slices) patients.push_back(p);
  Rng rng(seed);
  rng.shuffle(std::span(patients));

  const double n_total = static_cast<double>(manifest.entries.size());
  SplitPlan plan;
  plan.seed = seed;
  plan.ratios.assign(ratios.begin(), ratios.end());
  static const char* kNames[] = {"train", "val", "test"};
  for (std::size_t i = 0; i < n_splits; ++i) {
    plan.names.push_back(i < 3 ? kNames[i] : "split" + std::to_string(i));
  }
  plan.parts.resize(n_splits);
  std::vector<double> counts(n_splits, 0.0);
  std::vector<std::map<std::string, double>> label_counts(n_splits);

  for (const auto& patient : patients) {
    const auto& own = slices.at(patient);
    std::size_t best = n_splits;
    double best_score = 0.0, best_deficit = 0.0;
    for (std::size_t s = 0; s < n_splits; ++s) {
      const double deficit = ratios[s] * n_total - counts[s];
      if (deficit <= 0.0) continue;
      double score = deficit;
      if (stratify_key) {
        score = 0.0;
        for (const auto& [label, c] : labels.at(patient)) {
          score += c * (ratios[s] * label_totals.at(label) - label_counts[s][label]);
        }
      }
      if (best == n_splits || score > best_score ||
          (score == best_score && deficit > best_deficit)) {
        best = s;
        best_score = score;
        best_deficit = deficit;
      }
    }
    if (best == n_splits) best = 0;  // only reachable through rounding of the targets
    counts[best] += static_cast<double>(own.size());
    if (stratify_key) {
      for (const auto& [label, c] : labels.at(patient)) label_counts[best][label] += c;
    }
    plan.parts[best].insert(plan.parts[best].end(), own.begin(), own.end());
  }
  for (auto& part : plan.parts) std::sort(part.begin(), part.end());
  return plan;
}

Eligibility nonempty_mask(const Manifest& manifest) {
  return [&manifest](const ManifestEntry& e) {
    if (!e.mask_path) return false;
    return load_mask_png(manifest.resolve(*e.mask_path)).count_nonzero() > 0;
  };
}

FewShotSample fewshot_sample(const Manifest& pool, std::uint64_t seed, const Eligibility& eligible) {
  std::map<std::string, std::vector<SliceKey>> by_patient;
  std::size_t n_eligible = 0;
  for (const auto& e : pool.entries) {
    if (!eligible(e)) continue;
    by_patient[e.patient_id].push_back(e.key());
    ++n_eligible;
  }
  const std::size_t need = kFewShotTrain + kFewShotVal;
  if (n_eligible < need) {
    fail(ErrorCode::kInsufficient, "few-shot sampling needs " + std::to_string(need) +
                                       " slices with non-empty masks, found " +
                                       std::to_string(n_eligible));
  }
  Rng rng(seed);
  std::vector<std::vector<SliceKey>> queues;
  for (auto& [p, keys] : by_patient) {
    rng.shuffle(std::span(keys));
    queues.push_back(keys);
  }
  rng.shuffle(std::span(queues));

  std::vector<SliceKey> drawn;
  std::vector<std::size_t> cursor(queues.size(), 0);
  while (drawn.size() < need) {
    for (std::size_t q = 0; q < queues.size() && drawn.size() < need; ++q) {
      if (cursor[q] < queues[q].size()) drawn.push_back(queues[q][cursor[q]++]);
    }
  }
  FewShotSample out;
  out.seed = seed;
  out.train_slices.assign(drawn.begin(), drawn.begin() + kFewShotTrain);
  out.val_slices.assign(drawn.begin() + kFewShotTrain, drawn.end());
  return out;
}

FewShotSample fewshot_sample(const Manifest& pool, std::uint64_t seed) {
  return fewshot_sample(pool, seed, nonempty_mask(pool));
}

RepeatOutcome repeat_protocol(const Manifest& pool, std::span<const std::uint64_t> seeds,
                              const FewShotTask& task, const Eligibility& eligible) {
  if (seeds.empty()) fail(ErrorCode::kValidation, "repeat_protocol needs at least one seed");
  RepeatOutcome out;
  std::vector<double> d2, d3, n3;
  for (std::uint64_t seed : seeds) {
    MetricReport report = task(fewshot_sample(pool, seed, eligible));
    d2.push_back(report.dsc2d.mean);
    d3.push_back(report.dsc3d.mean);
    n3.push_back(report.nsd3d.mean);
    out.runs.push_back(std::move(report));
  }
  out.dsc2d = summarize(d2);
  out.dsc3d = summarize(d3);
  out.nsd3d = summarize(n3);
  return out;
}

}  // namespace slicebench
