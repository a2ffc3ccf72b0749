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

#include <cmath>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace freqid {
namespace {

using testing::max_rel_spectrum_diff;
using testing::random_gray;

TEST(Dft2Test, ConstantImage) {
  for (auto [h, w] : {std::pair{4, 4}, std::pair{3, 5}, std::pair{7, 1}}) {
    const Spectrum f = dft2(GrayImage(h, w, 0.6));
    EXPECT_NEAR(f(0, 0).real(), 0.6, 1e-12);
    EXPECT_NEAR(f(0, 0).imag(), 0.0, 1e-12);
    for (int a = 0; a < h; ++a) {
      for (int b = 0; b < w; ++b) {
        if (a == 0 && b == 0) continue;
        EXPECT_NEAR(std::abs(f(a, b)), 0.0, 1e-12);
      }
    }
  }
}

TEST(Dft2Test, Impulse) {
  GrayImage img(6, 10);
  img(0, 0) = 1.0;
  const Spectrum f = dft2(img);
  for (Complex v : f.values()) {
    EXPECT_NEAR(v.real(), 1.0 / 60.0, 1e-15);
    EXPECT_NEAR(v.imag(), 0.0, 1e-15);
  }
}

TEST(Dft2Test, TwoByTwo) {
  const GrayImage img(2, 2, std::vector<double>{1, 2, 3, 4});
  const Spectrum f = dft2(img);
  EXPECT_NEAR(f(0, 0).real(), 2.5, 1e-15);
  EXPECT_NEAR(f(0, 1).real(), -0.5, 1e-15);
  EXPECT_NEAR(f(1, 0).real(), -1.0, 1e-15);
  EXPECT_NEAR(f(1, 1).real(), 0.0, 1e-15);
  for (Complex v : f.values()) EXPECT_NEAR(v.imag(), 0.0, 1e-15);
}

TEST(Dft2Test, MatchesNaiveOracle) {
  std::uint64_t seed = 0;
  for (int h : {1, 2, 3, 4, 5, 8, 12, 15, 16, 17, 32}) {
    for (int w : {1, 3, 8, 15, 17}) {
      const GrayImage img = random_gray(h, w, seed++);
      EXPECT_LE(max_rel_spectrum_diff(dft2(img), naive_dft2(img)), 1e-10) << h << "x" << w;
    }
  }
}

TEST(Dft2Test, NaiveOracleSizeGuard) {
  EXPECT_NO_THROW(naive_dft2(GrayImage(64, 64)));
  try {
    naive_dft2(GrayImage(65, 64));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOracleSizeExceeded);
  }
}

TEST(Dft2Test, ParsevalConjugateSymmetryLinearity) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const int h = 3 + static_cast<int>(seed * 7 % 62);
    const int w = 2 + static_cast<int>(seed * 13 % 63);
    const GrayImage x = random_gray(h, w, seed);
    const GrayImage y = random_gray(h, w, seed + 1000);
    const Spectrum fx = dft2(x);
    double spatial = 0.0;
    for (double v : x.values()) spatial += v * v;
    double spectral = 0.0;
    for (Complex v : fx.values()) spectral += std::norm(v);
    EXPECT_NEAR(spectral / (spatial / (h * w)), 1.0, 1e-10);

    double scale = 0.0;
    for (Complex v : fx.values()) scale = std::max(scale, std::abs(v));
    for (int a = 0; a < h; ++a) {
      for (int b = 0; b < w; ++b) {
        const Complex mirror = fx((h - a) % h, (w - b) % w);
        EXPECT_LE(std::abs(fx(a, b) - std::conj(mirror)), 1e-10 * scale);
      }
    }

    GrayImage combo(h, w);
    for (std::size_t i = 0; i < combo.size(); ++i) {
      combo.values()[i] = 0.3 * x.values()[i] - 2.0 * y.values()[i];
    }
    const Spectrum fy = dft2(y);
    const Spectrum fc = dft2(combo);
    for (std::size_t i = 0; i < fc.size(); ++i) {
      EXPECT_LE(std::abs(fc.values()[i] - (0.3 * fx.values()[i] - 2.0 * fy.values()[i])), 1e-12);
    }
  }
}

TEST(LogRealSpectrumTest, Examples) {
  Spectrum s(1, 3);
  s(0, 0) = Complex(0.0, 0.0);
  s(0, 1) = Complex(std::exp(1.0) - 1.0 - kDefaultEpsilon, 0.0);
  s(0, 2) = Complex(3.0, 4.0);
  const LogSpectrum lit = log_real_spectrum(s);
  const LogSpectrum euc = log_real_spectrum(s, kDefaultEpsilon, SpectrumMode::kEuclidean);
  EXPECT_EQ(lit.mode(), SpectrumMode::kLiteral);
  EXPECT_NEAR(lit(0, 0), std::log1p(1e-8), 1e-15);
  EXPECT_NEAR(lit(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(euc(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(lit(0, 2), std::log(8.0 + 1e-8), 1e-15);
  EXPECT_NEAR(lit(0, 2), 2.0794, 1e-4);
  EXPECT_NEAR(euc(0, 2), std::log(6.0 + 1e-8), 1e-15);
  EXPECT_NEAR(euc(0, 2), 1.7918, 1e-4);
  EXPECT_THROW(log_real_spectrum(s, 0.0), Error);
}

TEST(LogRealSpectrumTest, FloorHoldsEverywhere) {
  const LogSpectrum ls = log_real_spectrum(dft2(random_gray(9, 9, 4)));
  for (double v : ls.values()) EXPECT_GE(v, std::log1p(1e-8) * (1 - 1e-12));
}

TEST(FftShiftTest, Examples) {
  Grid<double> g(4, 4);
  g(0, 0) = 1.0;
  const Grid<double> s = fftshift_view(g);
  EXPECT_EQ(s(2, 2), 1.0);
  EXPECT_EQ(fftshift_view(s), g);

  Grid<double> odd(3, 3);
  odd(0, 0) = 5.0;
  EXPECT_EQ(fftshift_view(odd)(1, 1), 5.0);

  for (auto [h, w] : {std::pair{3, 5}, std::pair{4, 7}, std::pair{6, 6}}) {
    Grid<double> m(h, w);
    for (std::size_t i = 0; i < m.size(); ++i) m.values()[i] = static_cast<double>(i);
    EXPECT_EQ(ifftshift_view(fftshift_view(m)), m);
    const Grid<double> sh = fftshift_view(m);
    for (int a = 0; a < h; ++a) {
      for (int b = 0; b < w; ++b) EXPECT_EQ(sh((a + h / 2) % h, (b + w / 2) % w), m(a, b));
    }
  }

  const Spectrum spec = dft2(GrayImage(4, 6, 1.0));
  EXPECT_NEAR(fftshift_view(spec)(2, 3).real(), 1.0, 1e-15);
}

}  // namespace
}  // namespace freqid
