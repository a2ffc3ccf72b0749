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

// Two-band split. The low band keeps all three channels (color and
// illumination); the high band is gray(x) - blur(gray(x)), a signed
// single-channel residual that is unchanged by adding a constant to x.

#pragma once

#include <algorithm>

#include "freqid/gaussian.hpp"
#include "freqid/image.hpp"

namespace freqid {

struct FreqPair {
  RasterImage low;
  GrayImage high;
};

inline RasterImage low_freq(const RasterImage& img, const GaussianKernel& kernel) {
  return blur(img, kernel);
}

inline GrayImage high_freq(const RasterImage& img, const GaussianKernel& kernel,
                           const GrayCoefficients& coeffs = {}) {
  GrayImage gray = rgb_to_gray(img, coeffs);
  const GrayImage low = blur(gray, kernel);
  auto g = gray.values();
  auto l = low.values();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] -= l[i];
  return gray;
}

inline FreqPair decompose(const RasterImage& img, const GaussianKernel& kernel,
                          const GrayCoefficients& coeffs = {}) {
  return {low_freq(img, kernel), high_freq(img, kernel, coeffs)};
}

/// Affine map of a signed band onto [0,1] for display; a flat band maps to 0.5.
inline GrayImage normalize_for_display(const GrayImage& band) {
  auto v = band.values();
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  GrayImage out(band.height(), band.width(), 0.5);
  if (*hi > *lo) {
    const double span = *hi - *lo;
    auto o = out.values();
    for (std::size_t i = 0; i < v.size(); ++i) o[i] = (v[i] - *lo) / span;
  }
  return out;
}

}  // namespace freqid
