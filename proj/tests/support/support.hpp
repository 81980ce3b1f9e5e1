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

// Reference implementations used as test oracles. They are written for
// clarity, not speed, and share no code with the library beyond its types.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slicebench/error.hpp"
#include "slicebench/manifest.hpp"
#include "slicebench/rng.hpp"
#include "slicebench/tensor.hpp"

namespace slicebench::testing {

namespace fs = std::filesystem;

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// Code of the slicebench::Error thrown by fn; std::nullopt when nothing
/// (or something else) was thrown.
template <typename Fn>
std::optional<ErrorCode> code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  } catch (...) {
  }
  return std::nullopt;
}

/// Binary mask from an arbitrary predicate over (z, y, x).
template <typename Pred>
LabelMask mask_from(std::size_t d, std::size_t h, std::size_t w, Pred pred) {
  NdArray<std::uint16_t> a({d, h, w});
  for (std::size_t z = 0; z < d; ++z)
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) a(z, y, x) = pred(z, y, x) ? 1 : 0;
  return LabelMask(std::move(a));
}

LabelMask box_mask(std::size_t d, std::size_t h, std::size_t w, std::array<int, 3> lo,
                   std::array<int, 3> hi);

/// Random binary mask: a few random boxes, optionally with salt noise.
LabelMask random_mask(Rng& rng, std::size_t d, std::size_t h, std::size_t w);

/// Voxels with a 6-neighbour outside the foreground, by direct enumeration.
std::vector<std::array<int, 3>> brute_surface(const LabelMask& m);

/// NSD from all pairwise surface distances.
double brute_nsd(const LabelMask& pred, const LabelMask& gt, double tau,
                 std::array<double, 3> spacing = {1, 1, 1});

/// Voxel-count DSC.
double count_dsc(const LabelMask& pred, const LabelMask& gt);

/// Two-sided p-value of Student's t by Simpson integration of the density.
double t_two_sided_quadrature(double t, double df);

double naive_pearson(std::span<const double> x, std::span<const double> y);

/// Ranks by counting: rank(i) = #{x_j < x_i} + (#{x_j == x_i} + 1) / 2.
std::vector<double> counting_ranks(std::span<const double> x);

/// Squared Fréchet distance with every matrix function evaluated through a
/// self-adjoint eigendecomposition (an independent second path).
double frechet_eigen_oracle(const Eigen::VectorXd& mu_a, const Eigen::MatrixXd& s_a,
                            const Eigen::VectorXd& mu_b, const Eigen::MatrixXd& s_b);

Eigen::MatrixXd random_spd(Rng& rng, int n);

/// Points {n, c} drawn from `centers.size()` isotropic Gaussians of the given
/// sigma, n_per points each, label = center index.
NdArray<float> gaussian_blobs(Rng& rng, const std::vector<std::vector<double>>& centers,
                              std::size_t n_per, double sigma, std::vector<int>* labels);

/// Manifest whose entries carry only keys; patient p owns slices_per[p] slices.
Manifest key_manifest(const std::vector<std::size_t>& slices_per, const std::string& label_key = "",
                      std::uint64_t label_seed = 0);

std::vector<std::uint8_t> read_bytes(const fs::path& path);
std::string read_text(const fs::path& path);

/// Directory with the stored golden files.
fs::path golden_dir();

}  // namespace slicebench::testing
