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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slicebench/manifest.hpp"
#include "slicebench/metrics.hpp"
#include "slicebench/protocol.hpp"
#include "slicebench/tensor.hpp"

namespace slicebench {

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct ProbeConfig {
  double lr = 1e-4;
  int epochs = 100;
  double l2 = 1e-4;  // coefficient on |W|_F^2; the bias is not penalized
  int batch = 64;
  std::uint64_t seed = 0;
  AdamParams adam;

  void validate() const;
};

/// Per-channel mean over the spatial grid of a {h, w, c} map.
Eigen::VectorXd pool_features(const FeatureMap& map);

/// Multinomial logistic regression, W {classes, features}, b {classes}.
struct SoftmaxRegression {
  Eigen::MatrixXd weights;
  Eigen::VectorXd bias;

  SoftmaxRegression(int n_classes, int n_features);

  /// Row-wise class probabilities for samples x (rows).
  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& x) const;
  std::vector<int> predict(const Eigen::MatrixXd& x) const;

  /// Mean cross-entropy over the rows plus l2 * |W|_F^2.
  double loss(const Eigen::MatrixXd& x, std::span<const int> y, double l2) const;

  /// Gradients of loss() with respect to W and b.
  void gradient(const Eigen::MatrixXd& x, std::span<const int> y, double l2,
                Eigen::MatrixXd& grad_w, Eigen::VectorXd& grad_b) const;
};

/// Bias-corrected Adam over the two parameter blocks of a SoftmaxRegression.
class AdamOptimizer {
 public:
  AdamOptimizer(const SoftmaxRegression& model, double lr, AdamParams params);

  void step(SoftmaxRegression& model, const Eigen::MatrixXd& grad_w,
            const Eigen::VectorXd& grad_b);

  long steps() const { return t_; }

 private:
  double lr_;
  AdamParams p_;
  long t_ = 0;
  Eigen::MatrixXd m_w_, v_w_;
  Eigen::VectorXd m_b_, v_b_;
};

struct EpochRecord {
  double train_loss = 0.0;  // full training-set loss after the epoch
  double val_accuracy = 0.0;
};

struct ProbeResult {
  double best_val_accuracy = 0.0;
  int best_epoch = 0;  // 1-based, first epoch reaching the maximum
  double initial_loss = 0.0;
  std::vector<EpochRecord> history;
  ConfusionMatrix confusion_at_best;
  int n_classes = 0;
  Eigen::MatrixXd final_weights;
  Eigen::VectorXd final_bias;
};

/// Trains from W = 0, b = 0 with mini-batch Adam, reshuffling every epoch
/// from a stream seeded by cfg.seed. Labels must lie in [0, n_classes) where
/// n_classes = 1 + the largest label seen; every class must occur in the
/// training split (kCoverage). A non-finite loss throws kDivergence.
ProbeResult train_linear(const Eigen::MatrixXd& x_train, std::span<const int> y_train,
                         const Eigen::MatrixXd& x_val, std::span<const int> y_val,
                         const ProbeConfig& cfg);

struct ProbeTaskResult {
  ProbeResult result;
  std::vector<std::string> class_names;  // index = class id
  std::size_t n_train = 0;
  std::size_t n_val = 0;
};

/// Class names sorted numerically when every label is an integer, otherwise
/// lexicographically.
std::vector<std::string> class_names_of(const Manifest& manifest, const std::string& label_key);

/// Pools every feature map of the manifest, trains on split part 0 and
/// validates on part 1.
ProbeTaskResult probe_task(const Manifest& features, const SplitPlan& split,
                           const std::string& label_key, const ProbeConfig& cfg);

}  // namespace slicebench
