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

// Gaussian low-pass kernel and the blur that produces the low-frequency band.
//
// The blur is a correlation,
//
//   out[i,j] = sum_{m,n} w[m,n] * x[i+m, j+n],   m,n in [-(k-1)/2, (k-1)/2],
//
// which coincides with convolution because w is symmetric. Out-of-range
// reads are folded back with reflect padding (edge sample not repeated), so
// x[-1] = x[1] and x[n] = x[n-2]. The fold is applied repeatedly for images
// narrower than the kernel radius.

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "freqid/error.hpp"
#include "freqid/image.hpp"

namespace freqid {

class GaussianKernel {
 public:
  int size() const noexcept { return size_; }
  int radius() const noexcept { return (size_ - 1) / 2; }
  double sigma() const noexcept { return sigma_; }

  /// Normalized 1-D profile, length size().
  const std::vector<double>& profile() const noexcept { return profile_; }

  /// Normalized 2-D weights, row-major size() x size(). Offset (m,n) lives at
  /// index (m + radius) * size + (n + radius).
  const std::vector<double>& weights() const noexcept { return weights_; }

  double weight(int m, int n) const {
    return weights_[static_cast<std::size_t>(m + radius()) * size_ + (n + radius())];
  }

 private:
  friend GaussianKernel build_kernel(int, std::optional<double>);
  int size_ = 0;
  double sigma_ = 0.0;
  std::vector<double> profile_;
  std::vector<double> weights_;
};

/// sigma used when the caller does not pick one: +-3 sigma spans the kernel.
inline double default_sigma(int k) { return (k - 1) / 6.0; }

/// Builds the k x k kernel exp(-(i^2 + j^2) / (2 sigma^2)), renormalized so
/// the discrete weights sum to one.
inline GaussianKernel build_kernel(int k, std::optional<double> sigma = std::nullopt) {
  if (k < 3 || k % 2 == 0) {
    throw Error(ErrorCode::kInvalidKernelSize,
                "kernel size must be odd and >= 3, got " + std::to_string(k));
  }
  const double s = sigma.value_or(default_sigma(k));
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw Error(ErrorCode::kInvalidSigma, "sigma must be positive, got " + std::to_string(s));
  }
  GaussianKernel kern;
  kern.size_ = k;
  kern.sigma_ = s;
  const int half = (k - 1) / 2;
  const double inv_two_var = 1.0 / (2.0 * s * s);

  kern.profile_.resize(k);
  double sum1 = 0.0;
  for (int i = -half; i <= half; ++i) {
    kern.profile_[i + half] = std::exp(-(i * i) * inv_two_var);
    sum1 += kern.profile_[i + half];
  }
  for (double& p : kern.profile_) p /= sum1;

  // The 1/(2 pi sigma^2) prefactor cancels in the normalization.
  kern.weights_.resize(static_cast<std::size_t>(k) * k);
  double sum2 = 0.0;
  for (int i = -half; i <= half; ++i) {
    for (int j = -half; j <= half; ++j) {
      const double w = std::exp(-(i * i + j * j) * inv_two_var);
      kern.weights_[static_cast<std::size_t>(i + half) * k + (j + half)] = w;
      sum2 += w;
    }
  }
  for (double& w : kern.weights_) w /= sum2;
  return kern;
}

/// Maps an out-of-range index onto [0, n) by reflection about the edge samples.
inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

namespace detail {

// 1-D correlation with the kernel profile along rows (axis 1) or columns (axis 0).
inline GrayImage correlate_axis(const GrayImage& in, const std::vector<double>& taps, int axis) {
  const int h = in.height();
  const int w = in.width();
  const int half = static_cast<int>(taps.size() - 1) / 2;
  GrayImage out(h, w);
  if (axis == 1) {
    std::vector<int> idx(static_cast<std::size_t>(w) * taps.size());
    for (int c = 0; c < w; ++c) {
      for (int t = -half; t <= half; ++t) idx[c * taps.size() + (t + half)] = reflect_index(c + t, w);
    }
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        double acc = 0.0;
        for (std::size_t t = 0; t < taps.size(); ++t) acc += taps[t] * in(r, idx[c * taps.size() + t]);
        out(r, c) = acc;
      }
    }
  } else {
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        double acc = 0.0;
        for (int t = -half; t <= half; ++t) acc += taps[t + half] * in(reflect_index(r + t, h), c);
        out(r, c) = acc;
      }
    }
  }
  return out;
}

// Transpose of correlate_axis: every padded read becomes an accumulate into
// the pixel it was reflected from.
inline GrayImage correlate_axis_adjoint(const GrayImage& g, const std::vector<double>& taps,
                                        int axis) {
  const int h = g.height();
  const int w = g.width();
  const int half = static_cast<int>(taps.size() - 1) / 2;
  GrayImage out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double v = g(r, c);
      for (int t = -half; t <= half; ++t) {
        if (axis == 1) {
          out(r, reflect_index(c + t, w)) += taps[t + half] * v;
        } else {
          out(reflect_index(r + t, h), c) += taps[t + half] * v;
        }
      }
    }
  }
  return out;
}

}  // namespace detail

/// Separable blur: row pass then column pass.
inline GrayImage blur(const GrayImage& img, const GaussianKernel& kernel) {
  return detail::correlate_axis(detail::correlate_axis(img, kernel.profile(), 1),
                                kernel.profile(), 0);
}

inline RasterImage blur(const RasterImage& img, const GaussianKernel& kernel) {
  return merge_channels({blur(channel(img, 0), kernel), blur(channel(img, 1), kernel),
                         blur(channel(img, 2), kernel)});
}

/// Direct O(H W k^2) correlation with the 2-D weights. Reference path for the
/// separable implementation.
inline GrayImage blur_direct(const GrayImage& img, const GaussianKernel& kernel) {
  const int h = img.height();
  const int w = img.width();
  const int half = kernel.radius();
  GrayImage out(h, w);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      double acc = 0.0;
      for (int m = -half; m <= half; ++m) {
        const int r = reflect_index(i + m, h);
        for (int n = -half; n <= half; ++n) {
          acc += kernel.weight(m, n) * img(r, reflect_index(j + n, w));
        }
      }
      out(i, j) = acc;
    }
  }
  return out;
}

/// Transpose of blur() under reflect padding.
inline GrayImage blur_adjoint(const GrayImage& g, const GaussianKernel& kernel) {
  return detail::correlate_axis_adjoint(detail::correlate_axis_adjoint(g, kernel.profile(), 0),
                                        kernel.profile(), 1);
}

inline RasterImage blur_adjoint(const RasterImage& g, const GaussianKernel& kernel) {
  return merge_channels({blur_adjoint(channel(g, 0), kernel), blur_adjoint(channel(g, 1), kernel),
                         blur_adjoint(channel(g, 2), kernel)});
}

}  // namespace freqid
