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

#include "slicebench/frd.hpp"

#include <cmath>

#include "slicebench/parallel.hpp"
#include "slicebench/png_io.hpp"

namespace slicebench {
namespace {

constexpr double kSymmetryTol = 1e-8;
constexpr double kNegativeEigenTol = 1e-8;
constexpr double kNegativeDistanceTol = 1e-6;

std::vector<RadiomicVector> extract_all(const std::vector<NdArray<float>>& images,
                                        const FrdConfig& cfg, std::size_t jobs) {
  std::vector<RadiomicVector> out(images.size());
  parallel_for(images.size(), jobs,
               [&](std::size_t i) { out[i] = radiomic_features(images[i], cfg); });
  return out;
}

std::vector<NdArray<float>> load_images(const Manifest& m) {
  std::vector<NdArray<float>> out;
  out.reserve(m.entries.size());
  for (const auto& e : m.entries) out.push_back(load_image_unit(m.resolve(e.image_path)));
  return out;
}

}  // namespace

Standardizer Standardizer::fit(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) fail(ErrorCode::kSize, "standardizer needs at least 2 samples");
  Standardizer s;
  s.mean = x.colwise().mean().transpose();
  s.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double ss = (x.col(j).array() - s.mean(j)).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(x.rows() - 1));
    s.scale(j) = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) fail(ErrorCode::kDimension, "standardizer width mismatch");
  Eigen::MatrixXd out = x.rowwise() - mean.transpose();
  for (Eigen::Index j = 0; j < out.cols(); ++j) out.col(j) /= scale(j);
  return out;
}

Eigen::MatrixXd to_matrix(const std::vector<RadiomicVector>& vectors) {
  if (vectors.empty()) return {};
  const std::size_t f = vectors.front().values.size();
  Eigen::MatrixXd x(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(f));
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].values.size() != f) fail(ErrorCode::kDimension, "feature vector lengths differ");
    for (std::size_t j = 0; j < f; ++j) {
      const double v = vectors[i].values[j];
      if (!std::isfinite(v)) fail(ErrorCode::kValidation, "non-finite radiomic feature");
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return x;
}

GaussianSummary fit_gaussian(const Eigen::MatrixXd& x, double eps) {
  if (x.rows() < 2) fail(ErrorCode::kSize, "Gaussian fit needs at least 2 samples");
  if (!(eps > 0.0)) fail(ErrorCode::kValidation, "eps must be positive");
  GaussianSummary g;
  g.n = static_cast<std::size_t>(x.rows());
  g.eps = eps;
  g.mu = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - g.mu.transpose();
  g.sigma = (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
  g.sigma = 0.5 * (g.sigma + g.sigma.transpose());
  g.sigma.diagonal().array() += eps;
  return g;
}

GaussianSummary fit_gaussian(const std::vector<RadiomicVector>& vectors, const FrdConfig& cfg,
                             const Standardizer* reference) {
  if (vectors.size() < 2) fail(ErrorCode::kSize, "Gaussian fit needs at least 2 vectors");
  Eigen::MatrixXd x = to_matrix(vectors);
  if (cfg.standardize) {
    const Standardizer own = reference ? *reference : Standardizer::fit(x);
    x = own.apply(x);
  }
  return fit_gaussian(x, cfg.eps);
}

Eigen::MatrixXd matrix_sqrt_psd(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) fail(ErrorCode::kDimension, "matrix square root needs a square matrix");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    fail(ErrorCode::kNumericDomain, "matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) fail(ErrorCode::kNumericDomain, "eigendecomposition failed");
  Eigen::VectorXd lambda = solver.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -kNegativeEigenTol) {
      fail(ErrorCode::kNumericDomain, "matrix is indefinite (eigenvalue " +
                                          std::to_string(lambda(i)) + ")");
    }
    lambda(i) = lambda(i) < 0.0 ? 0.0 : std::sqrt(lambda(i));
  }
  const Eigen::MatrixXd& v = solver.eigenvectors();
  Eigen::MatrixXd root = v * lambda.asDiagonal() * v.transpose();
  return 0.5 * (root + root.transpose());
}

double frechet_distance(const GaussianSummary& a, const GaussianSummary& b) {
  if (a.mu.size() != b.mu.size() || a.sigma.rows() != b.sigma.rows()) {
    fail(ErrorCode::kDimension, "Gaussian summaries have different dimensions");
  }
  const Eigen::MatrixXd root_a = matrix_sqrt_psd(a.sigma);
  Eigen::MatrixXd inner = root_a * b.sigma * root_a;
  inner = 0.5 * (inner + inner.transpose());
  const double cross = matrix_sqrt_psd(inner).trace();
  const double d2 = (a.mu - b.mu).squaredNorm() + a.sigma.trace() + b.sigma.trace() - 2.0 * cross;
  if (d2 < -kNegativeDistanceTol) {
    fail(ErrorCode::kNumericDomain, "negative squared Frechet distance " + std::to_string(d2));
  }
  return d2 < 0.0 ? 0.0 : d2;
}

double frd_between_images(const std::vector<NdArray<float>>& set_a,
                          const std::vector<NdArray<float>>& set_b, const FrdConfig& cfg,
                          std::size_t jobs) {
  cfg.validate();
  if (set_a.size() < 2 || set_b.size() < 2) {
    fail(ErrorCode::kSize, "FRD needs at least 2 images per set");
  }
  const Eigen::MatrixXd xa = to_matrix(extract_all(set_a, cfg, jobs));
  const Eigen::MatrixXd xb = to_matrix(extract_all(set_b, cfg, jobs));
  if (!cfg.standardize) return frechet_distance(fit_gaussian(xa, cfg.eps), fit_gaussian(xb, cfg.eps));
  const Standardizer ref = Standardizer::fit(xa);
  return frechet_distance(fit_gaussian(ref.apply(xa), cfg.eps), fit_gaussian(ref.apply(xb), cfg.eps));
}

double frd_between_sets(const Manifest& set_a, const Manifest& set_b, const FrdConfig& cfg,
                        std::size_t jobs) {
  if (set_a.entries.size() < 2 || set_b.entries.size() < 2) {
    fail(ErrorCode::kSize, "FRD needs at least 2 images per set");
  }
  return frd_between_images(load_images(set_a), load_images(set_b), cfg, jobs);
}

}  // namespace slicebench
