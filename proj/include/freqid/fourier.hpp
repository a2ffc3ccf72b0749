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

// Forward-normalized 2-D DFT and the log-magnitude spectrum.
//
//   F(a,b) = 1/(HW) sum_{h,w} exp(-2 pi i h a / H) exp(-2 pi i w b / W) I(h,w)
//
// The 1/(HW) factor sits on the forward transform, so F(0,0) is the image
// mean and sum |F|^2 = (1/(HW)) sum I^2.
//
// Any size is supported. Power-of-two lengths use an iterative radix-2 FFT;
// other lengths go through Bluestein's chirp-z reformulation on a padded
// power-of-two grid.

#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "freqid/error.hpp"
#include "freqid/image.hpp"

namespace freqid {

using Complex = std::complex<double>;

/// Complex H x W DFT grid in natural layout: bin (0,0) is DC.
class Spectrum : public Grid<Complex> {
 public:
  using Grid::Grid;
  Spectrum(Grid<Complex> g) : Grid(std::move(g)) {}
};

enum class SpectrumMode {
  kLiteral,    ///< log(1 + |Re| + |Im| + eps)
  kEuclidean,  ///< log(1 + sqrt(Re^2 + Im^2) + eps)
};

inline std::string to_string(SpectrumMode mode) {
  return mode == SpectrumMode::kLiteral ? "literal" : "euclidean";
}

inline SpectrumMode parse_spectrum_mode(const std::string& s) {
  if (s == "literal") return SpectrumMode::kLiteral;
  if (s == "euclidean") return SpectrumMode::kEuclidean;
  throw Error(ErrorCode::kInvalidArgument, "unknown spectrum mode '" + s + "'");
}

/// Real log spectrum, same layout as the Spectrum it came from.
class LogSpectrum : public Grid<double> {
 public:
  LogSpectrum() = default;
  LogSpectrum(int height, int width, SpectrumMode mode) : Grid(height, width), mode_(mode) {}
  SpectrumMode mode() const noexcept { return mode_; }

 private:
  SpectrumMode mode_ = SpectrumMode::kLiteral;
};

namespace detail {

// exp(-2 pi i num / den) with the angle reduced before the trig call.
inline Complex unit_root(std::size_t num, std::size_t den) {
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(num % den) /
                       static_cast<double>(den);
  return {std::cos(angle), std::sin(angle)};
}

class Radix2 {
 public:
  Radix2() = default;
  explicit Radix2(std::size_t n) : n_(n), rev_(n), twiddle_(n / 2) {
    const int bits = std::countr_zero(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      rev_[i] = r;
    }
    for (std::size_t k = 0; k < n / 2; ++k) twiddle_[k] = unit_root(k, n);
  }

  // Unnormalized; inverse flips the exponent sign.
  void run(std::span<Complex> a, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i) {
      if (i < rev_[i]) std::swap(a[i], a[rev_[i]]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t step = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t k = 0; k < half; ++k) {
          Complex w = twiddle_[k * step];
          if (inverse) w = std::conj(w);
          const Complex u = a[start + k];
          const Complex v = a[start + k + half] * w;
          a[start + k] = u + v;
          a[start + k + half] = u - v;
        }
      }
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> rev_;
  std::vector<Complex> twiddle_;
};

/// Unnormalized forward DFT of a fixed length, sum_k x_k exp(-2 pi i jk/n).
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    if (std::has_single_bit(n)) {
      radix2_ = Radix2(n);
      return;
    }
    // Bluestein: jk = (j^2 + k^2 - (j-k)^2) / 2.
    m_ = std::bit_ceil(2 * n - 1);
    radix2_ = Radix2(m_);
    chirp_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      // exp(-i pi k^2 / n) = exp(-2 pi i (k^2 mod 2n) / (2n))
      chirp_[k] = unit_root((k * k) % (2 * n), 2 * n);
    }
    filter_.assign(m_, Complex{});
    filter_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n; ++k) {
      filter_[k] = std::conj(chirp_[k]);
      filter_[m_ - k] = std::conj(chirp_[k]);
    }
    radix2_.run(filter_, false);
  }

  std::size_t size() const noexcept { return n_; }

  void forward(std::span<Complex> x) const {
    if (m_ == 0) {
      radix2_.run(x, false);
      return;
    }
    std::vector<Complex> work(m_);
    for (std::size_t k = 0; k < n_; ++k) work[k] = x[k] * chirp_[k];
    radix2_.run(work, false);
    for (std::size_t k = 0; k < m_; ++k) work[k] *= filter_[k];
    radix2_.run(work, true);
    const double inv_m = 1.0 / static_cast<double>(m_);
    for (std::size_t k = 0; k < n_; ++k) x[k] = work[k] * inv_m * chirp_[k];
  }

 private:
  std::size_t n_;
  std::size_t m_ = 0;
  Radix2 radix2_;
  std::vector<Complex> chirp_;
  std::vector<Complex> filter_;
};

}  // namespace detail

/// Forward-normalized 2-D DFT of a complex grid.
inline Spectrum dft2(const Grid<Complex>& in) {
  const int h = in.height();
  const int w = in.width();
  Spectrum out(in);
  const detail::FftPlan row_plan(static_cast<std::size_t>(w));
  for (int r = 0; r < h; ++r) {
    row_plan.forward(out.values().subspan(static_cast<std::size_t>(r) * w, w));
  }
  const detail::FftPlan col_plan(static_cast<std::size_t>(h));
  std::vector<Complex> column(h);
  const double scale = 1.0 / (static_cast<double>(h) * w);
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) column[r] = out(r, c);
    col_plan.forward(column);
    for (int r = 0; r < h; ++r) out(r, c) = column[r] * scale;
  }
  return out;
}

inline Spectrum dft2(const GrayImage& img) {
  Grid<Complex> g(img.height(), img.width());
  auto src = img.values();
  auto dst = g.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i];
  return dft2(g);
}

/// Largest H*W accepted by naive_dft2.
inline constexpr int kNaiveDftMaxElements = 4096;

/// Literal quadruple loop over the forward-normalized definition. Reference
/// oracle for dft2; O(H^2 W^2).
inline Spectrum naive_dft2(const GrayImage& img) {
  const int h = img.height();
  const int w = img.width();
  if (static_cast<long>(h) * w > kNaiveDftMaxElements) {
    throw Error(ErrorCode::kOracleSizeExceeded,
                "naive_dft2 is limited to " + std::to_string(kNaiveDftMaxElements) + " pixels");
  }
  std::vector<Complex> root_h(h);
  std::vector<Complex> root_w(w);
  for (int i = 0; i < h; ++i) root_h[i] = detail::unit_root(i, h);
  for (int i = 0; i < w; ++i) root_w[i] = detail::unit_root(i, w);
  Spectrum out(h, w);
  const double scale = 1.0 / (static_cast<double>(h) * w);
  for (int a = 0; a < h; ++a) {
    for (int b = 0; b < w; ++b) {
      Complex acc{};
      for (int y = 0; y < h; ++y) {
        const Complex ey = root_h[(static_cast<long>(y) * a) % h];
        for (int x = 0; x < w; ++x) {
          acc += ey * root_w[(static_cast<long>(x) * b) % w] * img(y, x);
        }
      }
      out(a, b) = acc * scale;
    }
  }
  return out;
}

/// Stabilizing floor added inside the log.
inline constexpr double kDefaultEpsilon = 1e-8;

inline double log_real_value(Complex f, double epsilon, SpectrumMode mode) {
  const double mag = mode == SpectrumMode::kLiteral ? std::abs(f.real()) + std::abs(f.imag())
                                                    : std::abs(f);
  return std::log(1.0 + mag + epsilon);
}

inline LogSpectrum log_real_spectrum(const Spectrum& spec, double epsilon = kDefaultEpsilon,
                                     SpectrumMode mode = SpectrumMode::kLiteral) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be positive");
  LogSpectrum out(spec.height(), spec.width(), mode);
  auto src = spec.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = log_real_value(src[i], epsilon, mode);
  return out;
}

/// Position of natural-layout bin (a,b) in the DC-centered layout.
inline std::pair<int, int> shifted_index(int a, int b, int height, int width) {
  return {(a + height / 2) % height, (b + width / 2) % width};
}

/// Quadrant swap that moves DC to (H/2, W/2) (integer division).
template <typename G>
G fftshift_view(const G& in) {
  G out = in;
  const int h = in.height();
  const int w = in.width();
  for (int a = 0; a < h; ++a) {
    for (int b = 0; b < w; ++b) {
      const auto [u, v] = shifted_index(a, b, h, w);
      out(u, v) = in(a, b);
    }
  }
  return out;
}

/// Inverse of fftshift_view for any size.
template <typename G>
G ifftshift_view(const G& in) {
  G out = in;
  const int h = in.height();
  const int w = in.width();
  for (int a = 0; a < h; ++a) {
    for (int b = 0; b < w; ++b) {
      const auto [u, v] = shifted_index(a, b, h, w);
      out(a, b) = in(u, v);
    }
  }
  return out;
}

}  // namespace freqid
