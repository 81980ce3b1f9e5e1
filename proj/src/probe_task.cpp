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

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "slicebench/fmap.hpp"
#include "slicebench/probe.hpp"

namespace slicebench {
namespace {

bool parse_int(const std::string& s, long& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::vector<std::string> class_names_of(const Manifest& manifest, const std::string& label_key) {
  std::set<std::string> labels;
  for (const auto& e : manifest.entries) {
    const auto v = e.field(label_key);
    if (!v) fail(ErrorCode::kValidation, "entry " + e.key().str() + " has no '" + label_key + "'");
    labels.insert(*v);
  }
  std::vector<std::string> names(labels.begin(), labels.end());
  long a = 0, b = 0;
  const bool numeric = std::all_of(names.begin(), names.end(),
                                   [&](const std::string& s) { return parse_int(s, a); });
  if (numeric) {
    std::sort(names.begin(), names.end(), [&](const std::string& x, const std::string& y) {
      parse_int(x, a);
      parse_int(y, b);
      return a < b;
    });
  }
  return names;
}

ProbeTaskResult probe_task(const Manifest& features, const SplitPlan& split,
                           const std::string& label_key, const ProbeConfig& cfg) {
  if (split.parts.size() < 2) fail(ErrorCode::kValidation, "probe needs a train and a val split");
  ProbeTaskResult out;
  out.class_names = class_names_of(features, label_key);
  std::map<std::string, int> class_id;
  for (std::size_t i = 0; i < out.class_names.size(); ++i) {
    class_id[out.class_names[i]] = static_cast<int>(i);
  }

  auto build = [&](const Manifest& part, Eigen::MatrixXd& x, std::vector<int>& y) {
    std::vector<Eigen::VectorXd> rows;
    for (const auto& e : part.entries) {
      if (!e.feature_path) fail(ErrorCode::kValidation, "entry " + e.key().str() + " has no feature_path");
      rows.push_back(pool_features(read_fmap(part.resolve(*e.feature_path))));
      y.push_back(class_id.at(*e.field(label_key)));
    }
    if (rows.empty()) fail(ErrorCode::kSize, "empty probe split");
    x.resize(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != x.cols()) fail(ErrorCode::kDimension, "feature widths differ");
      x.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
  };
  Eigen::MatrixXd x_train, x_val;
  std::vector<int> y_train, y_val;
  build(split.subset(features, 0), x_train, y_train);
  build(split.subset(features, 1), x_val, y_val);
  out.n_train = y_train.size();
  out.n_val = y_val.size();
  out.result = train_linear(x_train, y_train, x_val, y_val, cfg);
  return out;
}

}  // namespace slicebench
