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
#include <string>
#include <vector>

namespace slicebench {

struct Correlation {
  double r = 0.0;
  double p = 1.0;
};

/// Two-sided p-value of a correlation coefficient r over n samples from the
/// t statistic r * sqrt((n-2) / (1-r^2)) with n-2 degrees of freedom,
/// evaluated as the regularized incomplete beta I_{1-r^2}((n-2)/2, 1/2).
double correlation_p_value(double r, std::size_t n);

/// Sample Pearson correlation (two-pass) with t-distribution p-value.
/// Throws kSize for n < 3 and kDegenerate for a constant input.
Correlation pearson(std::span<const double> x, std::span<const double> y);

/// Ranks starting at 1; tied values share the mean of the ranks they occupy.
std::vector<double> average_ranks(std::span<const double> x);

/// Pearson correlation of average ranks, p-value via the same t
/// approximation.
Correlation spearman(std::span<const double> x, std::span<const double> y);

/// Permutation p-value for Spearman's rho: exact enumeration of all n!
/// orderings of y for n <= 10, otherwise `mc_permutations` seeded shuffles.
double spearman_permutation_p(std::span<const double> x, std::span<const double> y,
                              std::uint64_t seed = 0, std::size_t mc_permutations = 100000);

struct CorrelationRecord {
  std::string dataset;
  double delta = 0.0;    // few-shot improvement over the reference model
  double frd_fsl = 0.0;  // FRD pre-training set vs few-shot pool
  double frd_test = 0.0; // FRD pre-training set vs test set
};

enum class FrdField { kFsl, kTest };

struct CorrelationResult {
  double r_pearson = 0.0;
  double p_pearson = 1.0;
  double r_spearman = 0.0;
  double p_spearman = 1.0;
  std::size_t n = 0;
};

/// Correlates delta against the chosen FRD column. Needs >= 3 records.
CorrelationResult correlate(std::span<const CorrelationRecord> records, FrdField field);

double frd_value(const CorrelationRecord& record, FrdField field);

/// JSON-lines `{"dataset", "delta", "frd_fsl", "frd_test"}`.
std::vector<CorrelationRecord> load_records(const std::filesystem::path& path);
void save_records(std::span<const CorrelationRecord> records, const std::filesystem::path& path);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept; needs two distinct x.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace slicebench
