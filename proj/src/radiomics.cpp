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

#include "slicebench/radiomics.hpp"

#include <algorithm>
#include <cmath>

namespace slicebench {
namespace {

double percentile_sorted(const std::vector<double>& s, double p) {
  const double rank = p * static_cast<double>(s.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return s[lo] + (s[hi] - s[lo]) * frac;
}

double entropy_bits(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

// Otsu threshold on the histogram; returns the fraction of pixels in bins
// above the optimal split, 0 when all pixels share one bin.
double otsu_fraction(const std::vector<std::size_t>& hist, std::size_t total) {
  const std::size_t bins = hist.size();
  double sum_all = 0.0;
  for (std::size_t b = 0; b < bins; ++b) sum_all += static_cast<double>(b) * static_cast<double>(hist[b]);
  double best = 0.0;
  std::size_t best_t = bins;
  double w0 = 0.0, sum0 = 0.0;
  for (std::size_t t = 0; t + 1 < bins; ++t) {
    w0 += static_cast<double>(hist[t]);
    sum0 += static_cast<double>(t) * static_cast<double>(hist[t]);
    const double w1 = static_cast<double>(total) - w0;
    if (w0 == 0.0 || w1 == 0.0) continue;
    const double m0 = sum0 / w0;
    const double m1 = (sum_all - sum0) / w1;
    const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (between > best) {
      best = between;
      best_t = t;
    }
  }
  if (best_t == bins) return 0.0;
  std::size_t above = 0;
  for (std::size_t b = best_t + 1; b < bins; ++b) above += hist[b];
  return static_cast<double>(above) / static_cast<double>(total);
}

}  // namespace

void FrdConfig::validate() const {
  if (n_bins < 2) fail(ErrorCode::kValidation, "n_bins must be at least 2");
  if (!(eps > 0.0)) fail(ErrorCode::kValidation, "eps must be positive");
  if (resize && (resize->first < 2 || resize->second < 2)) {
    fail(ErrorCode::kValidation, "resize target must be at least 2x2");
  }
}

const std::array<std::string_view, kRadiomicFeatureCount>& radiomic_feature_names() {
  static constexpr std::array<std::string_view, kRadiomicFeatureCount> kNames = {
      "mean",          "variance",          "skewness",         "kurtosis",
      "min",           "max",               "p10",              "p25",
      "p50",           "p75",               "p90",              "iqr",
      "mad",           "entropy",           "uniformity",       "rms",
      "glcm_contrast", "glcm_dissimilarity", "glcm_homogeneity", "glcm_asm",
      "glcm_correlation", "glcm_entropy",   "centroid_y",       "centroid_x",
      "moment_yy",     "moment_xx",         "moment_xy",        "gradient_mean",
      "gradient_variance", "otsu_fraction", "radial_0",         "radial_1",
      "radial_2",      "radial_3"};
  return kNames;
}

NdArray<std::uint16_t> quantize(const NdArray<float>& image, int n_bins) {
  NdArray<std::uint16_t> out(image.dims());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double v = std::clamp(static_cast<double>(image[i]), 0.0, 1.0);
    const int level = std::min(static_cast<int>(std::floor(v * n_bins)), n_bins - 1);
    out[i] = static_cast<std::uint16_t>(level);
  }
  return out;
}

GlcmFeatures glcm_features(const NdArray<std::uint16_t>& q, int n_bins, int dy, int dx) {
  const long h = static_cast<long>(q.dim(0));
  const long w = static_cast<long>(q.dim(1));
  const std::size_t nb = static_cast<std::size_t>(n_bins);
  std::vector<double> p(nb * nb, 0.0);
  double total = 0.0;
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const long y2 = y + dy, x2 = x + dx;
      if (y2 < 0 || y2 >= h || x2 < 0 || x2 >= w) continue;
      const std::size_t a = q(static_cast<std::size_t>(y), static_cast<std::size_t>(x));
      const std::size_t b = q(static_cast<std::size_t>(y2), static_cast<std::size_t>(x2));
      p[a * nb + b] += 1.0;
      p[b * nb + a] += 1.0;
      total += 2.0;
    }
  }
  GlcmFeatures f;
  if (total == 0.0) return f;
  for (double& v : p) v /= total;

  double mu = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = 0; j < nb; ++j) mu += static_cast<double>(i) * p[i * nb + j];
  }
  double var = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      const double pij = p[i * nb + j];
      if (pij == 0.0) continue;
      const double di = static_cast<double>(i) - mu;
      const double dj = static_cast<double>(j) - mu;
      const double diff = static_cast<double>(i) - static_cast<double>(j);
      f.contrast += pij * diff * diff;
      f.dissimilarity += pij * std::abs(diff);
      f.homogeneity += pij / (1.0 + diff * diff);
      f.asm_ += pij * pij;
      f.entropy -= pij * std::log2(pij);
      var += pij * di * di;
      cov += pij * di * dj;
    }
  }
  f.correlation = var > 1e-15 ? cov / var : 0.0;
  return f;
}

NdArray<float> resize_nearest(const NdArray<float>& image, std::size_t out_h, std::size_t out_w) {
  if (image.rank() != 2) fail(ErrorCode::kDimension, "resize expects a 2D image");
  NdArray<float> out({out_h, out_w});
  for (std::size_t y = 0; y < out_h; ++y) {
    for (std::size_t x = 0; x < out_w; ++x) {
      out(y, x) = image(y * image.dim(0) / out_h, x * image.dim(1) / out_w);
    }
  }
  return out;
}

RadiomicVector radiomic_features(const NdArray<float>& input, const FrdConfig& cfg) {
  cfg.validate();
  if (input.rank() != 2 || input.dim(0) < 2 || input.dim(1) < 2) {
    fail(ErrorCode::kDimension, "radiomic features need a 2D image of at least 2x2");
  }
  for (float v : input.data()) {
    if (!std::isfinite(v)) fail(ErrorCode::kValidation, "image contains non-finite values");
  }
  const NdArray<float> image =
      cfg.resize ? resize_nearest(input, cfg.resize->first, cfg.resize->second) : input;
  const std::size_t h = image.dim(0), w = image.dim(1), n = image.size();
  const double dn = static_cast<double>(n);
  std::vector<double> f;
  f.reserve(kRadiomicFeatureCount);

  // First order, accumulated over sorted values.
  std::vector<double> s(image.data().begin(), image.data().end());
  std::sort(s.begin(), s.end());
  double sum = 0.0, sum_sq = 0.0;
  for (double v : s) {
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / dn;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0, mad = 0.0;
  for (double v : s) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
    mad += std::abs(d);
  }
  m2 /= dn;
  m3 /= dn;
  m4 /= dn;
  const bool flat = m2 <= 0.0;
  const double p25 = percentile_sorted(s, 0.25);
  const double p75 = percentile_sorted(s, 0.75);

  const NdArray<std::uint16_t> levels = quantize(image, cfg.n_bins);
  std::vector<std::size_t> hist(static_cast<std::size_t>(cfg.n_bins), 0);
  for (std::uint16_t l : levels.data()) ++hist[l];
  std::vector<double> probs(hist.size());
  double uniformity = 0.0;
  for (std::size_t b = 0; b < hist.size(); ++b) {
    probs[b] = static_cast<double>(hist[b]) / dn;
    uniformity += probs[b] * probs[b];
  }

  f.push_back(mean);
  f.push_back(m2);
  f.push_back(flat ? 0.0 : m3 / std::pow(m2, 1.5));
  f.push_back(flat ? 0.0 : m4 / (m2 * m2));
  f.push_back(s.front());
  f.push_back(s.back());
  f.push_back(percentile_sorted(s, 0.10));
  f.push_back(p25);
  f.push_back(percentile_sorted(s, 0.50));
  f.push_back(p75);
  f.push_back(percentile_sorted(s, 0.90));
  f.push_back(p75 - p25);
  f.push_back(mad / dn);
  f.push_back(entropy_bits(probs));
  f.push_back(uniformity);
  f.push_back(std::sqrt(sum_sq / dn));

  // Texture.
  static constexpr int kOffsets[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
  GlcmFeatures g;
  for (const auto& off : kOffsets) {
    const GlcmFeatures one = glcm_features(levels, cfg.n_bins, off[0], off[1]);
    g.contrast += one.contrast / 4.0;
    g.dissimilarity += one.dissimilarity / 4.0;
    g.homogeneity += one.homogeneity / 4.0;
    g.asm_ += one.asm_ / 4.0;
    g.correlation += one.correlation / 4.0;
    g.entropy += one.entropy / 4.0;
  }
  f.insert(f.end(), {g.contrast, g.dissimilarity, g.homogeneity, g.asm_, g.correlation, g.entropy});

  // Spatial statistics with pixel centres at ((y+0.5)/H, (x+0.5)/W).
  double mass = 0.0, cy = 0.0, cx = 0.0;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double v = std::max(0.0, static_cast<double>(image(y, x)));
      mass += v;
      cy += v * (static_cast<double>(y) + 0.5) / static_cast<double>(h);
      cx += v * (static_cast<double>(x) + 0.5) / static_cast<double>(w);
    }
  }
  double myy = 0.0, mxx = 0.0, mxy = 0.0;
  if (mass > 0.0) {
    cy /= mass;
    cx /= mass;
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const double v = std::max(0.0, static_cast<double>(image(y, x)));
        const double dy = (static_cast<double>(y) + 0.5) / static_cast<double>(h) - cy;
        const double dx = (static_cast<double>(x) + 0.5) / static_cast<double>(w) - cx;
        myy += v * dy * dy;
        mxx += v * dx * dx;
        mxy += v * dy * dx;
      }
    }
    myy /= mass;
    mxx /= mass;
    mxy /= mass;
  } else {
    cy = 0.5;
    cx = 0.5;
  }
  f.insert(f.end(), {cy, cx, myy, mxx, mxy});

  // Central differences inside, one-sided at the border.
  std::vector<double> grad(n);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t y0 = y == 0 ? 0 : y - 1, y1 = y + 1 == h ? y : y + 1;
      const std::size_t x0 = x == 0 ? 0 : x - 1, x1 = x + 1 == w ? x : x + 1;
      const double gy = (static_cast<double>(image(y1, x)) - image(y0, x)) / static_cast<double>(y1 - y0);
      const double gx = (static_cast<double>(image(y, x1)) - image(y, x0)) / static_cast<double>(x1 - x0);
      grad[y * w + x] = std::sqrt(gy * gy + gx * gx);
    }
  }
  double gmean = 0.0;
  for (double v : grad) gmean += v;
  gmean /= dn;
  double gvar = 0.0;
  for (double v : grad) gvar += (v - gmean) * (v - gmean);
  gvar /= dn;
  f.push_back(gmean);
  f.push_back(gvar);

  f.push_back(otsu_fraction(hist, n));

  std::array<double, 4> ring_sum{}, ring_count{};
  const double hh = static_cast<double>(h) / 2.0, hw = static_cast<double>(w) / 2.0;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double ry = (static_cast<double>(y) + 0.5 - hh) / hh;
      const double rx = (static_cast<double>(x) + 0.5 - hw) / hw;
      const double r = std::sqrt(ry * ry + rx * rx) / std::sqrt(2.0);
      const std::size_t ring = std::min<std::size_t>(3, static_cast<std::size_t>(std::floor(4.0 * r)));
      ring_sum[ring] += image(y, x);
      ring_count[ring] += 1.0;
    }
  }
  for (std::size_t r = 0; r < 4; ++r) {
    f.push_back(ring_count[r] > 0.0 ? ring_sum[r] / ring_count[r] : 0.0);
  }

  RadiomicVector out;
  out.values.reserve(f.size());
  for (double v : f) out.values.push_back(static_cast<float>(v));
  return out;
}

}  // namespace slicebench
