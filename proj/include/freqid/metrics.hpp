// Copyright (c) the freqid authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Full-reference image quality metrics: MSE, MAE, PSNR and SSIM.
//
// SSIM uses the canonical parameterization: 11x11 Gaussian window with
// sigma 1.5, K1 = 0.01, K2 = 0.03, dynamic range 1. Statistics are taken
// over every window that fits entirely inside the image ("valid" windows),
// per channel, and averaged over windows and channels.

#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "freqid/error.hpp"
#include "freqid/image.hpp"

namespace freqid {

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

struct MetricsReport {
  double mse = 0.0;
  double mae = 0.0;
  /// +inf when mse == 0.
  double psnr = 0.0;
  double ssim = 0.0;
};

inline double mse(const RasterImage& a, const RasterImage& b) {
  require_same_shape(a, b, "mse");
  auto av = a.values();
  auto bv = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    acc += d * d;
  }
  return acc / static_cast<double>(av.size());
}

inline double mae(const RasterImage& a, const RasterImage& b) {
  require_same_shape(a, b, "mae");
  auto av = a.values();
  auto bv = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += std::abs(av[i] - bv[i]);
  return acc / static_cast<double>(av.size());
}

inline double psnr(const RasterImage& a, const RasterImage& b, double peak = 1.0) {
  if (!(peak > 0.0)) throw Error(ErrorCode::kInvalidArgument, "peak must be positive");
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / m);
}

namespace detail {

inline std::vector<double> ssim_window(const SsimParams& p) {
  std::vector<double> w(p.window);
  const int half = p.window / 2;
  double sum = 0.0;
  for (int i = 0; i < p.window; ++i) {
    const double d = i - half;
    w[i] = std::exp(-d * d / (2.0 * p.sigma * p.sigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Valid-mode separable filtering of a row-major h x w plane.
inline std::vector<double> filter_valid(const std::vector<double>& in, int h, int w,
                                        const std::vector<double>& taps) {
  const int k = static_cast<int>(taps.size());
  const int ow = w - k + 1;
  const int oh = h - k + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int t = 0; t < k; ++t) acc += taps[t] * in[static_cast<std::size_t>(r) * w + c + t];
      rows[static_cast<std::size_t>(r) * ow + c] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int r = 0; r < oh; ++r) {
    for (int c = 0; c < ow; ++c) {
      double acc = 0.0;
      for (int t = 0; t < k; ++t) acc += taps[t] * rows[static_cast<std::size_t>(r + t) * ow + c];
      out[static_cast<std::size_t>(r) * ow + c] = acc;
    }
  }
  return out;
}

}  // namespace detail

inline double ssim(const RasterImage& a, const RasterImage& b, const SsimParams& p = {}) {
  require_same_shape(a, b, "ssim");
  const int h = a.height();
  const int w = a.width();
  if (h < p.window || w < p.window) {
    throw Error(ErrorCode::kImageTooSmall, "ssim needs at least " + std::to_string(p.window) +
                                               "x" + std::to_string(p.window) + " pixels");
  }
  const std::vector<double> taps = detail::ssim_window(p);
  const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
  const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);
  const std::size_t n = static_cast<std::size_t>(h) * w;
  double total = 0.0;
  std::size_t count = 0;
  for (int ch = 0; ch < 3; ++ch) {
    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * w + c;
        x[i] = a(r, c, ch);
        y[i] = b(r, c, ch);
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
      }
    }
    const auto mx = detail::filter_valid(x, h, w, taps);
    const auto my = detail::filter_valid(y, h, w, taps);
    const auto mxx = detail::filter_valid(xx, h, w, taps);
    const auto myy = detail::filter_valid(yy, h, w, taps);
    const auto mxy = detail::filter_valid(xy, h, w, taps);
    for (std::size_t i = 0; i < mx.size(); ++i) {
      const double var_x = mxx[i] - mx[i] * mx[i];
      const double var_y = myy[i] - my[i] * my[i];
      const double cov = mxy[i] - mx[i] * my[i];
      total += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
               ((mx[i] * mx[i] + my[i] * my[i] + c1) * (var_x + var_y + c2));
    }
    count += mx.size();
  }
  return total / static_cast<double>(count);
}

inline MetricsReport compute_metrics(const RasterImage& a, const RasterImage& b,
                                     double peak = 1.0) {
  return {mse(a, b), mae(a, b), psnr(a, b, peak), ssim(a, b)};
}

}  // namespace freqid
