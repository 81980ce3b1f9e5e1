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

#include <vector>

#include <Eigen/Dense>

#include "slicebench/manifest.hpp"
#include "slicebench/radiomics.hpp"

namespace slicebench {

struct GaussianSummary {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;  // unbiased sample covariance + eps * I
  std::size_t n = 0;
  double eps = 0.0;
};

/// Per-feature affine map fitted on a reference population. Features with
/// zero spread keep scale 1.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static Standardizer fit(const Eigen::MatrixXd& samples);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& samples) const;
};

/// Rows are samples.
Eigen::MatrixXd to_matrix(const std::vector<RadiomicVector>& vectors);

GaussianSummary fit_gaussian(const Eigen::MatrixXd& samples, double eps);

/// Standardizes with `reference` (when cfg.standardize) and fits.
GaussianSummary fit_gaussian(const std::vector<RadiomicVector>& vectors, const FrdConfig& cfg,
                             const Standardizer* reference = nullptr);

/// Symmetric PSD square root through a symmetric eigendecomposition.
/// Eigenvalues in [-1e-8, 0) are clipped to 0; anything lower, or an
/// asymmetry above 1e-8, throws kNumericDomain.
Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m);

/// Squared Fréchet distance between two Gaussians:
/// |mu_a - mu_b|^2 + tr(S_a + S_b - 2 (S_a^1/2 S_b S_a^1/2)^1/2).
double frechet_distance(const GaussianSummary& a, const GaussianSummary& b);

/// FRD between two image sets; set_a is the standardization reference.
double frd_between_images(const std::vector<NdArray<float>>& set_a,
                          const std::vector<NdArray<float>>& set_b, const FrdConfig& cfg,
                          std::size_t jobs = 1);

/// Loads each manifest's images (8-bit PNG scaled to [0, 1]) and calls
/// frd_between_images.
double frd_between_sets(const Manifest& set_a, const Manifest& set_b, const FrdConfig& cfg,
                        std::size_t jobs = 1);

}  // namespace slicebench
