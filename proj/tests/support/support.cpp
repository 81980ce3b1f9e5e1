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

#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>

#include <unistd.h>

#include <Eigen/Eigenvalues>

namespace slicebench::testing {

namespace {
std::atomic<int> g_counter{0};
}

TempDir::TempDir(const std::string& tag) {
  path_ = fs::temp_directory_path() /
          ("slicebench_" + tag + "_" + std::to_string(::getpid()) + "_" +
           std::to_string(g_counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

LabelMask box_mask(std::size_t d, std::size_t h, std::size_t w, std::array<int, 3> lo,
                   std::array<int, 3> hi) {
  return mask_from(d, h, w, [&](std::size_t z, std::size_t y, std::size_t x) {
    const int p[3] = {static_cast<int>(z), static_cast<int>(y), static_cast<int>(x)};
    for (int i = 0; i < 3; ++i) {
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    }
    return true;
  });
}

LabelMask random_mask(Rng& rng, std::size_t d, std::size_t h, std::size_t w) {
  NdArray<std::uint16_t> a({d, h, w});
  const int boxes = static_cast<int>(rng.index(4));  // 0 boxes gives an empty mask sometimes
  const std::size_t dims[3] = {d, h, w};
  for (int b = 0; b < boxes; ++b) {
    std::size_t lo[3], hi[3];
    for (int i = 0; i < 3; ++i) {
      lo[i] = rng.index(dims[i]);
      hi[i] = lo[i] + rng.index(dims[i] - lo[i]);
    }
    for (std::size_t z = lo[0]; z <= hi[0]; ++z)
      for (std::size_t y = lo[1]; y <= hi[1]; ++y)
        for (std::size_t x = lo[2]; x <= hi[2]; ++x) a(z, y, x) = 1;
  }
  if (rng.uniform() < 0.5) {
    const double p = rng.uniform(0.0, 0.1);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (rng.uniform() < p) a[i] = 1 - a[i];
    }
  }
  return LabelMask(std::move(a));
}

std::vector<std::array<int, 3>> brute_surface(const LabelMask& m) {
  const auto& dims = m.dims();
  const int d = static_cast<int>(dims[0]), h = static_cast<int>(dims[1]), w = static_cast<int>(dims[2]);
  auto on = [&](int z, int y, int x) {
    if (z < 0 || y < 0 || x < 0 || z >= d || y >= h || x >= w) return false;
    return m.labels(static_cast<std::size_t>(z), static_cast<std::size_t>(y),
                    static_cast<std::size_t>(x)) != 0;
  };
  const int nb[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
  std::vector<std::array<int, 3>> out;
  for (int z = 0; z < d; ++z)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!on(z, y, x)) continue;
        bool edge = false;
        for (const auto& o : nb) edge = edge || !on(z + o[0], y + o[1], x + o[2]);
        if (edge) out.push_back({z, y, x});
      }
  return out;
}

double brute_nsd(const LabelMask& pred, const LabelMask& gt, double tau,
                 std::array<double, 3> spacing) {
  const auto sp = brute_surface(pred);
  const auto sg = brute_surface(gt);
  if (sp.empty() && sg.empty()) return 1.0;
  if (sp.empty() || sg.empty()) return 0.0;
  auto within = [&](const std::array<int, 3>& a, const std::vector<std::array<int, 3>>& set) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : set) {
      double s = 0;
      for (int i = 0; i < 3; ++i) {
        const double dd = (a[i] - b[i]) * spacing[i];
        s += dd * dd;
      }
      best = std::min(best, s);
    }
    return best <= tau * tau;
  };
  std::size_t hits = 0;
  for (const auto& a : sp) hits += within(a, sg);
  for (const auto& a : sg) hits += within(a, sp);
  return static_cast<double>(hits) / static_cast<double>(sp.size() + sg.size());
}

double count_dsc(const LabelMask& pred, const LabelMask& gt) {
  double p = 0, g = 0, both = 0;
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    p += pred.labels[i] != 0;
    g += gt.labels[i] != 0;
    both += (pred.labels[i] != 0) && (gt.labels[i] != 0);
  }
  return p + g == 0 ? 1.0 : 2 * both / (p + g);
}

double t_two_sided_quadrature(double t, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) /
                   std::sqrt(df * std::numbers::pi);
  auto f = [&](double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
  const double b = std::abs(t);
  if (b == 0) return 1.0;
  const int n = 200000;  // even
  const double h = b / n;
  double s = f(0) + f(b);
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4 : 2);
  const double central = s * h / 3;
  return std::clamp(1.0 - 2.0 * central, 0.0, 1.0);
}

double naive_pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return (sxy / (n - 1)) / (std::sqrt(sxx / (n - 1)) * std::sqrt(syy / (n - 1)));
}

std::vector<double> counting_ranks(std::span<const double> x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double less = 0, eq = 0;
    for (double v : x) {
      less += v < x[i];
      eq += v == x[i];
    }
    r[i] = less + (eq + 1) / 2;
  }
  return r;
}

double frechet_eigen_oracle(const Eigen::VectorXd& mu_a, const Eigen::MatrixXd& s_a,
                            const Eigen::VectorXd& mu_b, const Eigen::MatrixXd& s_b) {
  // S_a S_b is similar to S_a^1/2 S_b S_a^1/2, so the trace of the latter's
  // square root is the sum of square roots of the former's eigenvalues.
  Eigen::EigenSolver<Eigen::MatrixXd> es(s_a * s_b);
  double tr_sqrt = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    tr_sqrt += std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
  }
  return (mu_a - mu_b).squaredNorm() + s_a.trace() + s_b.trace() - 2 * tr_sqrt;
}

Eigen::MatrixXd random_spd(Rng& rng, int n) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

NdArray<float> gaussian_blobs(Rng& rng, const std::vector<std::vector<double>>& centers,
                              std::size_t n_per, double sigma, std::vector<int>* labels) {
  const std::size_t c = centers.front().size();
  NdArray<float> pts({centers.size() * n_per, c});
  if (labels) labels->clear();
  for (std::size_t k = 0; k < centers.size(); ++k) {
    for (std::size_t i = 0; i < n_per; ++i) {
      const std::size_t row = k * n_per + i;
      for (std::size_t j = 0; j < c; ++j) {
        pts(row, j) = static_cast<float>(rng.normal(centers[k][j], sigma));
      }
      if (labels) labels->push_back(static_cast<int>(k));
    }
  }
  return pts;
}

Manifest key_manifest(const std::vector<std::size_t>& slices_per, const std::string& label_key,
                      std::uint64_t label_seed) {
  Manifest m;
  m.dataset_name = "keys";
  Rng rng(label_seed);
  for (std::size_t p = 0; p < slices_per.size(); ++p) {
    for (std::size_t s = 0; s < slices_per[p]; ++s) {
      ManifestEntry e;
      e.patient_id = "P" + std::to_string(1000 + p);
      e.series_id = "S";
      e.slice_index = static_cast<int>(s);
      e.image_path = "img/" + e.patient_id + "_" + std::to_string(s) + ".png";
      if (!label_key.empty()) e.attributes[label_key] = rng.uniform() < 0.5 ? "0" : "1";
      m.entries.push_back(std::move(e));
    }
  }
  return m;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path golden_dir() { return fs::path(SLICEBENCH_GOLDEN_DIR); }

}  // namespace slicebench::testing
