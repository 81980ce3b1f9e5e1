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

#include "slicebench/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "slicebench/rng.hpp"

namespace slicebench {

void ProbeConfig::validate() const {
  if (!(lr > 0.0)) fail(ErrorCode::kValidation, "lr must be positive");
  if (epochs < 1) fail(ErrorCode::kValidation, "epochs must be at least 1");
  if (l2 < 0.0) fail(ErrorCode::kValidation, "l2 must be non-negative");
  if (batch < 1) fail(ErrorCode::kValidation, "batch must be at least 1");
}

Eigen::VectorXd pool_features(const FeatureMap& map) {
  map.validate();
  const std::size_t cells = map.grid_h() * map.grid_w();
  const std::size_t c = map.channels();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(c));
  const float* v = map.values.data().data();
  for (std::size_t i = 0; i < cells; ++i) {
    for (std::size_t j = 0; j < c; ++j) out(static_cast<Eigen::Index>(j)) += v[i * c + j];
  }
  return out / static_cast<double>(cells);
}

SoftmaxRegression::SoftmaxRegression(int n_classes, int n_features)
    : weights(Eigen::MatrixXd::Zero(n_classes, n_features)),
      bias(Eigen::VectorXd::Zero(n_classes)) {}

Eigen::MatrixXd SoftmaxRegression::probabilities(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd logits = x * weights.transpose();
  logits.rowwise() += bias.transpose();
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    logits.row(i) = (logits.row(i).array() - top).exp();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

std::vector<int> SoftmaxRegression::predict(const Eigen::MatrixXd& x) const {
  const Eigen::MatrixXd p = probabilities(x);
  std::vector<int> out(static_cast<std::size_t>(p.rows()));
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    Eigen::Index best = 0;
    p.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

double SoftmaxRegression::loss(const Eigen::MatrixXd& x, std::span<const int> y, double l2) const {
  Eigen::MatrixXd logits = x * weights.transpose();
  logits.rowwise() += bias.transpose();
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double top = logits.row(i).maxCoeff();
    const double lse = top + std::log((logits.row(i).array() - top).exp().sum());
    total += lse - logits(i, y[static_cast<std::size_t>(i)]);
  }
  return total / static_cast<double>(x.rows()) + l2 * weights.squaredNorm();
}

void SoftmaxRegression::gradient(const Eigen::MatrixXd& x, std::span<const int> y, double l2,
                                 Eigen::MatrixXd& grad_w, Eigen::VectorXd& grad_b) const {
  Eigen::MatrixXd residual = probabilities(x);
  for (Eigen::Index i = 0; i < residual.rows(); ++i) {
    residual(i, y[static_cast<std::size_t>(i)]) -= 1.0;
  }
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  grad_w = (residual.transpose() * x) * inv_n + 2.0 * l2 * weights;
  grad_b = residual.colwise().sum().transpose() * inv_n;
}

AdamOptimizer::AdamOptimizer(const SoftmaxRegression& model, double lr, AdamParams params)
    : lr_(lr),
      p_(params),
      m_w_(Eigen::MatrixXd::Zero(model.weights.rows(), model.weights.cols())),
      v_w_(m_w_),
      m_b_(Eigen::VectorXd::Zero(model.bias.size())),
      v_b_(m_b_) {}

void AdamOptimizer::step(SoftmaxRegression& model, const Eigen::MatrixXd& grad_w,
                         const Eigen::VectorXd& grad_b) {
  ++t_;
  const double c1 = 1.0 - std::pow(p_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(p_.beta2, static_cast<double>(t_));
  m_w_ = p_.beta1 * m_w_ + (1.0 - p_.beta1) * grad_w;
  v_w_ = p_.beta2 * v_w_ + (1.0 - p_.beta2) * grad_w.cwiseAbs2();
  m_b_ = p_.beta1 * m_b_ + (1.0 - p_.beta1) * grad_b;
  v_b_ = p_.beta2 * v_b_ + (1.0 - p_.beta2) * grad_b.cwiseAbs2();
  model.weights.array() -=
      lr_ * (m_w_.array() / c1) / ((v_w_.array() / c2).sqrt() + p_.epsilon);
  model.bias.array() -= lr_ * (m_b_.array() / c1) / ((v_b_.array() / c2).sqrt() + p_.epsilon);
}

ProbeResult train_linear(const Eigen::MatrixXd& x_train, std::span<const int> y_train,
                         const Eigen::MatrixXd& x_val, std::span<const int> y_val,
                         const ProbeConfig& cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(x_train.rows()) != y_train.size() ||
      static_cast<std::size_t>(x_val.rows()) != y_val.size()) {
    fail(ErrorCode::kDimension, "feature rows and label counts differ");
  }
  if (x_train.rows() == 0 || x_val.rows() == 0) fail(ErrorCode::kSize, "empty train or val split");
  if (x_train.cols() != x_val.cols()) fail(ErrorCode::kDimension, "train/val feature widths differ");
  if (!x_train.allFinite() || !x_val.allFinite()) fail(ErrorCode::kValidation, "non-finite features");

  int n_classes = 0;
  for (int v : y_train) n_classes = std::max(n_classes, v + 1);
  for (int v : y_val) n_classes = std::max(n_classes, v + 1);
  std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
  for (int v : y_train) {
    if (v < 0) fail(ErrorCode::kLabel, "negative class label");
    ++counts[static_cast<std::size_t>(v)];
  }
  for (int v : y_val) {
    if (v < 0) fail(ErrorCode::kLabel, "negative class label");
  }
  for (int c = 0; c < n_classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) {
      fail(ErrorCode::kCoverage, "class " + std::to_string(c) + " is missing from training data");
    }
  }

  SoftmaxRegression model(n_classes, static_cast<int>(x_train.cols()));
  AdamOptimizer adam(model, cfg.lr, cfg.adam);
  Rng rng(cfg.seed);

  ProbeResult result;
  result.n_classes = n_classes;
  result.initial_loss = model.loss(x_train, y_train, cfg.l2);

  const std::size_t n = static_cast<std::size_t>(x_train.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Eigen::MatrixXd xb, grad_w;
  Eigen::VectorXd grad_b;
  std::vector<int> yb;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch)) {
      const std::size_t len = std::min(static_cast<std::size_t>(cfg.batch), n - start);
      xb.resize(static_cast<Eigen::Index>(len), x_train.cols());
      yb.resize(len);
      for (std::size_t i = 0; i < len; ++i) {
        xb.row(static_cast<Eigen::Index>(i)) = x_train.row(static_cast<Eigen::Index>(order[start + i]));
        yb[i] = y_train[order[start + i]];
      }
      model.gradient(xb, yb, cfg.l2, grad_w, grad_b);
      adam.step(model, grad_w, grad_b);
    }
    const double train_loss = model.loss(x_train, y_train, cfg.l2);
    if (!std::isfinite(train_loss)) {
      fail(ErrorCode::kDivergence, "training loss became non-finite at epoch " + std::to_string(epoch));
    }
    const std::vector<int> preds = model.predict(x_val);
    const double acc = accuracy(preds, y_val);
    result.history.push_back({train_loss, acc});
    if (epoch == 1 || acc > result.best_val_accuracy) {
      result.best_val_accuracy = acc;
      result.best_epoch = epoch;
      result.confusion_at_best = confusion(preds, y_val, n_classes);
    }
  }
  result.final_weights = model.weights;
  result.final_bias = model.bias;
  return result;
}

}  // namespace slicebench
