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

// Pixel-grid data model shared by every other header.
//
// Pixel values are real and unclamped. The nominal range is [0,1] but loss
// and gradient paths operate on whatever values they are handed; clamping
// happens only when an image is written to disk.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "freqid/error.hpp"

namespace freqid {

/// Row-major H x W grid of T.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int height, int width, T fill = T{}) : height_(height), width_(width) {
    if (height < 1 || width < 1) {
      throw Error(ErrorCode::kInvalidArgument, "grid dimensions must be positive, got " +
                                                   std::to_string(height) + "x" +
                                                   std::to_string(width));
    }
    values_.assign(static_cast<std::size_t>(height) * width, fill);
  }
  Grid(int height, int width, std::vector<T> values) : Grid(height, width) {
    if (values.size() != values_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "buffer length does not match grid dimensions");
    }
    values_ = std::move(values);
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return values_.size(); }

  T& operator()(int r, int c) { return values_[static_cast<std::size_t>(r) * width_ + c]; }
  const T& operator()(int r, int c) const {
    return values_[static_cast<std::size_t>(r) * width_ + c];
  }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }

  bool same_shape(const Grid& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> values_;
};

namespace detail {

inline void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite pixel value");
  }
}

}  // namespace detail

/// Single-channel image. Holds grayscale conversions and high-frequency bands.
class GrayImage : public Grid<double> {
 public:
  GrayImage() = default;
  GrayImage(int height, int width, double fill = 0.0) : Grid(height, width, fill) {
    detail::require_finite(values());
  }
  GrayImage(int height, int width, std::vector<double> values)
      : Grid(height, width, std::move(values)) {
    detail::require_finite(this->values());
  }
};

/// H x W x 3 image, interleaved RGB, row-major.
class RasterImage {
 public:
  static constexpr int kChannels = 3;

  RasterImage() = default;
  RasterImage(int height, int width, double fill = 0.0) : height_(height), width_(width) {
    if (height < 1 || width < 1) {
      throw Error(ErrorCode::kInvalidArgument, "image dimensions must be positive");
    }
    values_.assign(static_cast<std::size_t>(height) * width * kChannels, fill);
    detail::require_finite(values_);
  }
  RasterImage(int height, int width, std::vector<double> values) : RasterImage(height, width) {
    if (values.size() != values_.size()) {
      throw Error(ErrorCode::kInvalidArgument, "pixel buffer length must equal height*width*3");
    }
    detail::require_finite(values);
    values_ = std::move(values);
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(int r, int c, int ch) {
    return values_[(static_cast<std::size_t>(r) * width_ + c) * kChannels + ch];
  }
  double operator()(int r, int c, int ch) const {
    return values_[(static_cast<std::size_t>(r) * width_ + c) * kChannels + ch];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(const RasterImage& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<double> values_;
};

inline std::string shape_string(int height, int width, int channels) {
  return std::to_string(height) + "x" + std::to_string(width) + "x" + std::to_string(channels);
}

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw Error(ErrorCode::kDimMismatch, std::string(what) + ": " +
                                             shape_string(a.height(), a.width(), 1) + " vs " +
                                             shape_string(b.height(), b.width(), 1));
  }
}

/// Luma weights applied by rgb_to_gray. Defaults to ITU-R BT.601.
struct GrayCoefficients {
  double r = 0.299;
  double g = 0.587;
  double b = 0.114;
};

inline GrayImage rgb_to_gray(const RasterImage& img, const GrayCoefficients& k = {}) {
  GrayImage out(img.height(), img.width());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      out(r, c) = k.r * img(r, c, 0) + k.g * img(r, c, 1) + k.b * img(r, c, 2);
    }
  }
  return out;
}

/// Adjoint of rgb_to_gray: broadcasts each gray value back scaled by the
/// per-channel coefficient.
inline RasterImage rgb_to_gray_adjoint(const GrayImage& g, const GrayCoefficients& k = {}) {
  RasterImage out(g.height(), g.width());
  for (int r = 0; r < g.height(); ++r) {
    for (int c = 0; c < g.width(); ++c) {
      out(r, c, 0) = k.r * g(r, c);
      out(r, c, 1) = k.g * g(r, c);
      out(r, c, 2) = k.b * g(r, c);
    }
  }
  return out;
}

inline GrayImage channel(const RasterImage& img, int ch) {
  GrayImage out(img.height(), img.width());
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) out(r, c) = img(r, c, ch);
  }
  return out;
}

inline RasterImage merge_channels(const std::array<GrayImage, 3>& planes) {
  require_same_shape(planes[0], planes[1], "merge_channels");
  require_same_shape(planes[0], planes[2], "merge_channels");
  RasterImage out(planes[0].height(), planes[0].width());
  for (int ch = 0; ch < 3; ++ch) {
    for (int r = 0; r < out.height(); ++r) {
      for (int c = 0; c < out.width(); ++c) out(r, c, ch) = planes[ch](r, c);
    }
  }
  return out;
}

}  // namespace freqid
