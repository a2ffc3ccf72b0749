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

// Raster I/O. Reads PNG (8/16-bit, gray or RGB, alpha dropped) and binary
// PPM (P6); writes 8-bit PNG. Format is detected from the file signature.

#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "freqid/error.hpp"
#include "freqid/image.hpp"

namespace freqid {

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kFileNotFound, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Skips whitespace and '#' comments, then parses an unsigned decimal.
inline std::size_t ppm_header_int(const std::vector<unsigned char>& buf, std::size_t& pos,
                                  const std::string& path) {
  for (;;) {
    while (pos < buf.size() && std::isspace(buf[pos])) ++pos;
    if (pos < buf.size() && buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  if (pos >= buf.size() || !std::isdigit(buf[pos])) {
    throw Error(ErrorCode::kCorruptData, "malformed PPM header in " + path);
  }
  std::size_t v = 0;
  while (pos < buf.size() && std::isdigit(buf[pos])) {
    v = v * 10 + (buf[pos] - '0');
    if (v > (1u << 24)) throw Error(ErrorCode::kCorruptData, "PPM header value too large");
    ++pos;
  }
  return v;
}

inline RasterImage decode_ppm(const std::vector<unsigned char>& buf, const std::string& path) {
  std::size_t pos = 2;
  const std::size_t width = ppm_header_int(buf, pos, path);
  const std::size_t height = ppm_header_int(buf, pos, path);
  const std::size_t maxval = ppm_header_int(buf, pos, path);
  if (width == 0 || height == 0 || maxval == 0 || maxval > 65535) {
    throw Error(ErrorCode::kCorruptData, "invalid PPM dimensions or maxval in " + path);
  }
  if (pos >= buf.size() || !std::isspace(buf[pos])) {
    throw Error(ErrorCode::kCorruptData, "truncated PPM header in " + path);
  }
  ++pos;
  const std::size_t bytes_per_sample = maxval < 256 ? 1 : 2;
  const std::size_t n = width * height * 3;
  if (buf.size() - pos < n * bytes_per_sample) {
    throw Error(ErrorCode::kCorruptData, "truncated PPM pixel data in " + path);
  }
  std::vector<double> values(n);
  const double scale = 1.0 / static_cast<double>(maxval);
  for (std::size_t i = 0; i < n; ++i) {
    unsigned v = buf[pos + i * bytes_per_sample];
    if (bytes_per_sample == 2) v = (v << 8) | buf[pos + i * 2 + 1];
    values[i] = static_cast<double>(v) * scale;
  }
  return RasterImage(static_cast<int>(height), static_cast<int>(width), std::move(values));
}

struct PngReadState {
  const std::vector<unsigned char>* buf;
  std::size_t pos;
};

inline void png_read_from_buffer(png_structp png, png_bytep out, png_size_t count) {
  auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (st->buf->size() - st->pos < count) {
    png_error(png, "unexpected end of PNG stream");
  }
  std::copy_n(st->buf->data() + st->pos, count, out);
  st->pos += count;
}

inline void png_silent_warning(png_structp, png_const_charp) {}

[[noreturn]] inline void png_silent_error(png_structp png, png_const_charp) { png_longjmp(png, 1); }

// libpng reports failures through longjmp; nothing with a destructor may
// live in this frame between setjmp and the longjmp.
inline bool decode_png_raw(const std::vector<unsigned char>& buf, png_uint_32& width,
                           png_uint_32& height, int& bit_depth, std::vector<unsigned char>& raw,
                           std::string& message) {
  PngReadState state{&buf, 0};
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_silent_error, png_silent_warning);
  if (!png) {
    message = "png_create_read_struct failed";
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    message = "png_create_info_struct failed";
    return false;
  }
  std::vector<png_bytep>* rows = new std::vector<png_bytep>();
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    delete rows;
    message = "corrupt or truncated PNG stream";
    return false;
  }
  png_set_read_fn(png, &state, png_read_from_buffer);
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_set_strip_alpha(png);
  if (bit_depth < 8) bit_depth = 8;
  png_read_update_info(png, info);
  const png_size_t rowbytes = png_get_rowbytes(png, info);
  raw.resize(rowbytes * height);
  rows->resize(height);
  for (png_uint_32 r = 0; r < height; ++r) (*rows)[r] = raw.data() + r * rowbytes;
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  delete rows;
  return true;
}

inline RasterImage decode_png(const std::vector<unsigned char>& buf, const std::string& path) {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 8;
  std::vector<unsigned char> raw;
  std::string message;
  if (!decode_png_raw(buf, width, height, bit_depth, raw, message)) {
    throw Error(ErrorCode::kCorruptData, message + " in " + path);
  }
  const std::size_t n = static_cast<std::size_t>(width) * height * 3;
  std::vector<double> values(n);
  if (bit_depth == 16) {
    // PNG stores 16-bit samples big-endian.
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = static_cast<double>((raw[2 * i] << 8) | raw[2 * i + 1]) / 65535.0;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) values[i] = static_cast<double>(raw[i]) / 255.0;
  }
  return RasterImage(static_cast<int>(height), static_cast<int>(width), std::move(values));
}

inline unsigned char quantize8(double v) {
  const double clamped = std::clamp(v, 0.0, 1.0);
  return static_cast<unsigned char>(std::lround(clamped * 255.0));
}

inline bool encode_png_raw(std::FILE* fp, int width, int height, int color_type,
                           const std::vector<unsigned char>& raw, int channels) {
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_silent_error, png_silent_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  std::vector<png_bytep>* rows = new std::vector<png_bytep>(height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    delete rows;
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int r = 0; r < height; ++r) {
    (*rows)[r] = const_cast<png_bytep>(raw.data() + static_cast<std::size_t>(r) * width * channels);
  }
  png_write_image(png, rows->data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  delete rows;
  return true;
}

inline void write_png8(const std::filesystem::path& path, int width, int height, int channels,
                       const std::vector<unsigned char>& raw) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw Error(ErrorCode::kIoError, "cannot open for writing: " + path.string());
  const int color_type = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  if (!encode_png_raw(fp.get(), width, height, color_type, raw, channels)) {
    throw Error(ErrorCode::kIoError, "PNG encoding failed for " + path.string());
  }
  if (std::fflush(fp.get()) != 0) {
    throw Error(ErrorCode::kIoError, "write failed for " + path.string());
  }
}

}  // namespace detail

/// Loads a PNG or binary PPM into [0,1]-scaled RGB. Gray PNGs are
/// replicated across the three channels.
inline RasterImage load_image(const std::filesystem::path& path) {
  const std::vector<unsigned char> buf = detail::read_all(path);
  static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (buf.size() >= 8 && std::equal(kPngSig, kPngSig + 8, buf.begin())) {
    return detail::decode_png(buf, path.string());
  }
  if (buf.size() >= 2 && buf[0] == 'P' && buf[1] == '6') {
    return detail::decode_ppm(buf, path.string());
  }
  throw Error(ErrorCode::kUnsupportedFormat, "not a PNG or P6 PPM: " + path.string());
}

/// Writes an 8-bit RGB PNG. Values are clamped to [0,1] and rounded.
inline void save_image(const RasterImage& img, const std::filesystem::path& path) {
  std::vector<unsigned char> raw(img.size());
  auto v = img.values();
  std::transform(v.begin(), v.end(), raw.begin(), detail::quantize8);
  detail::write_png8(path, img.width(), img.height(), 3, raw);
}

/// Writes an 8-bit single-channel PNG.
inline void save_image(const GrayImage& img, const std::filesystem::path& path) {
  std::vector<unsigned char> raw(img.size());
  auto v = img.values();
  std::transform(v.begin(), v.end(), raw.begin(), detail::quantize8);
  detail::write_png8(path, img.width(), img.height(), 1, raw);
}

}  // namespace freqid
