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

// Binary radial frequency masks. The low region is the closed disk of radius
// r around the DC-centered bin (H/2, W/2); the high region is its complement.
// Masks are described in centered coordinates but accept spectra in natural
// DFT layout and do the index shift themselves.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "freqid/error.hpp"
#include "freqid/fourier.hpp"
#include "freqid/image.hpp"

namespace freqid {

enum class MaskRegion { kLow, kHigh };

/// Radius for a 256x256 image; other sizes scale linearly with min(H, W).
inline constexpr double kReferenceRadius = 21.0;
inline constexpr double kReferenceResolution = 256.0;

inline double default_radius(int height, int width) {
  return kReferenceRadius * std::min(height, width) / kReferenceResolution;
}

class RadialMask {
 public:
  int height() const noexcept { return low_.height(); }
  int width() const noexcept { return low_.width(); }
  double radius() const noexcept { return radius_; }

  /// Membership in centered coordinates.
  bool low_centered(int u, int v) const { return low_(u, v) != 0; }
  bool high_centered(int u, int v) const { return low_(u, v) == 0; }

  /// Membership for a natural-layout DFT bin.
  bool low_bin(int a, int b) const {
    const auto [u, v] = shifted_index(a, b, height(), width());
    return low_(u, v) != 0;
  }
  bool in_region(int a, int b, MaskRegion region) const {
    return low_bin(a, b) == (region == MaskRegion::kLow);
  }

  /// Low region as a 0/1 grid in centered coordinates.
  const Grid<std::uint8_t>& low_region() const noexcept { return low_; }

 private:
  friend RadialMask build_mask(int, int, std::optional<double>);
  double radius_ = 0.0;
  Grid<std::uint8_t> low_;
};

inline RadialMask build_mask(int height, int width, std::optional<double> radius = std::nullopt) {
  if (height < 1 || width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "mask dimensions must be positive");
  }
  const double r = radius.value_or(default_radius(height, width));
  if (!(r >= 0.0)) {
    throw Error(ErrorCode::kInvalidRadius, "radius must be nonnegative, got " + std::to_string(r));
  }
  RadialMask mask;
  mask.radius_ = r;
  mask.low_ = Grid<std::uint8_t>(height, width);
  const int cu = height / 2;
  const int cv = width / 2;
  for (int u = 0; u < height; ++u) {
    for (int v = 0; v < width; ++v) {
      const double du = u - cu;
      const double dv = v - cv;
      mask.low_(u, v) = std::sqrt(du * du + dv * dv) <= r ? 1 : 0;
    }
  }
  return mask;
}

namespace detail {

inline void require_mask_shape(const RadialMask& mask, int h, int w) {
  if (mask.height() != h || mask.width() != w) {
    throw Error(ErrorCode::kDimMismatch,
                "mask is " + std::to_string(mask.height()) + "x" + std::to_string(mask.width()) +
                    ", spectrum is " + std::to_string(h) + "x" + std::to_string(w));
  }
}

inline double region_energy_fraction(const Spectrum& spec, const RadialMask& mask,
                                     MaskRegion region) {
  require_mask_shape(mask, spec.height(), spec.width());
  double total = 0.0;
  double inside = 0.0;
  for (int a = 0; a < spec.height(); ++a) {
    for (int b = 0; b < spec.width(); ++b) {
      const double e = std::norm(spec(a, b));
      total += e;
      if (mask.in_region(a, b, region)) inside += e;
    }
  }
  // An all-zero spectrum is treated as entirely low-frequency.
  if (total == 0.0) return region == MaskRegion::kLow ? 1.0 : 0.0;
  return inside / total;
}

}  // namespace detail

/// Share of the power spectrum |F|^2 inside the low disk.
inline double low_energy_fraction(const Spectrum& spec, const RadialMask& mask) {
  return detail::region_energy_fraction(spec, mask, MaskRegion::kLow);
}

inline double high_energy_fraction(const Spectrum& spec, const RadialMask& mask) {
  return detail::region_energy_fraction(spec, mask, MaskRegion::kHigh);
}

/// Zeroes every bin outside `region`. Layout is preserved.
inline LogSpectrum apply_mask(const LogSpectrum& logspec, const RadialMask& mask,
                              MaskRegion region) {
  detail::require_mask_shape(mask, logspec.height(), logspec.width());
  LogSpectrum out = logspec;
  for (int a = 0; a < out.height(); ++a) {
    for (int b = 0; b < out.width(); ++b) {
      if (!mask.in_region(a, b, region)) out(a, b) = 0.0;
    }
  }
  return out;
}

}  // namespace freqid
