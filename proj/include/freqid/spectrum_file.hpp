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

// Raw log-spectrum grid file.
//
//   offset 0   8 bytes   magic "FDITSPEC"
//   offset 8   u32 LE    H
//   offset 12  u32 LE    W
//   offset 16  H*W f64 LE, row-major
//
// Values are written in whatever layout the caller hands over; the CLI
// writes the natural DFT layout (DC first).

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "freqid/error.hpp"
#include "freqid/image.hpp"

namespace freqid {

inline constexpr std::array<char, 8> kSpectrumMagic = {'F', 'D', 'I', 'T', 'S', 'P', 'E', 'C'};

namespace detail {

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail

inline std::vector<unsigned char> encode_spectrum_grid(const Grid<double>& grid) {
  std::vector<unsigned char> out(kSpectrumMagic.begin(), kSpectrumMagic.end());
  detail::put_u32(out, static_cast<std::uint32_t>(grid.height()));
  detail::put_u32(out, static_cast<std::uint32_t>(grid.width()));
  out.reserve(out.size() + grid.size() * 8);
  for (double v : grid.values()) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
  }
  return out;
}

inline Grid<double> decode_spectrum_grid(const std::vector<unsigned char>& buf) {
  if (buf.size() < 16 || !std::equal(kSpectrumMagic.begin(), kSpectrumMagic.end(), buf.begin())) {
    throw Error(ErrorCode::kUnsupportedFormat, "missing FDITSPEC header");
  }
  const std::uint32_t h = detail::get_u32(buf.data() + 8);
  const std::uint32_t w = detail::get_u32(buf.data() + 12);
  if (h == 0 || w == 0) throw Error(ErrorCode::kCorruptData, "zero spectrum dimension");
  const std::uint64_t n = static_cast<std::uint64_t>(h) * w;
  if ((buf.size() - 16) / 8 < n || buf.size() - 16 != n * 8) {
    throw Error(ErrorCode::kCorruptData, "spectrum payload length does not match header");
  }
  std::vector<double> values(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[16 + i * 8 + b]) << (8 * b);
    values[i] = std::bit_cast<double>(bits);
  }
  return Grid<double>(static_cast<int>(h), static_cast<int>(w), std::move(values));
}

inline void write_spectrum_file(const Grid<double>& grid, const std::filesystem::path& path) {
  const auto bytes = encode_spectrum_grid(grid);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

inline Grid<double> read_spectrum_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kFileNotFound, path.string());
  const std::vector<unsigned char> buf{std::istreambuf_iterator<char>(in),
                                       std::istreambuf_iterator<char>()};
  return decode_spectrum_grid(buf);
}

}  // namespace freqid
