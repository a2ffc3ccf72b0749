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

// Expected values are frozen from tests/oracles/freeze_values.py.

#include <cmath>

#include "gtest/gtest.h"
#include "test_util.hpp"

namespace freqid {
namespace {

using testing::pattern;
using testing::random_image;

LossConfig small_config(SpectrumMode mode = SpectrumMode::kLiteral) {
  LossConfig cfg;
  cfg.kernel = build_kernel(3, 1.0);
  cfg.spectrum_mode = mode;
  cfg.radius = 1.0;
  return cfg;
}

TEST(LossesTest, FrozenPairValues) {
  const RasterImage a = pattern(4, 4, 1);
  const RasterImage b = pattern(4, 4, 2);
  EXPECT_NEAR(rec_pix_loss(a, b, small_config()), 0.32064981485579214, 1e-12);
  EXPECT_NEAR(trans_pix_loss(a, b, small_config()), 0.25150458394925074, 1e-12);
  EXPECT_NEAR(rec_fft_loss(a, b, small_config()), 0.022011969075574744, 1e-10);
  EXPECT_NEAR(rec_fft_loss(a, b, small_config(SpectrumMode::kEuclidean)), 0.018954525256662167,
              1e-10);

  const RasterImage c = pattern(8, 8, 3);
  const RasterImage d = pattern(8, 8, 4);
  EXPECT_NEAR(trans_fft_loss(c, d, small_config()), 0.0078574918946298852, 1e-10);
  EXPECT_NEAR(trans_fft_loss(c, d, small_config(SpectrumMode::kEuclidean)),
              0.0058629099568284744, 1e-10);
}

TEST(LossesTest, FrozenTotal) {
  const RasterImage q0 = pattern(8, 8, 5);
  const RasterImage q1 = pattern(8, 8, 6);
  const RasterImage q2 = pattern(8, 8, 7);
  const RasterImage q3 = pattern(8, 8, 8);
  const LossReport r = total_loss(0.25, q0, q1, q2, q3, LossWeights{}, small_config());
  EXPECT_NEAR(r.rec_pix, 0.35240396185511075, 1e-12);
  EXPECT_NEAR(r.trans_pix, 0.20627893440115147, 1e-12);
  EXPECT_NEAR(r.rec_fft, 0.012900292594109913, 1e-10);
  EXPECT_NEAR(r.trans_fft, 0.006189149502968885, 1e-10);
  EXPECT_NEAR(r.total, 0.82777233835334108, 1e-10);
  EXPECT_EQ(r.org, 0.25);
}

TEST(LossesTest, IdenticalInputsGiveZero) {
  const LossConfig cfg;
  const RasterImage x = random_image(16, 16, 3);
  for (LossTerm t : kAllLossTerms) EXPECT_EQ(evaluate_term(t, x, x, cfg), 0.0) << to_string(t);
  const LossReport r = total_loss(0.0, x, x, x, x, LossWeights{}, cfg);
  EXPECT_EQ(r.total, 0.0);
}

TEST(LossesTest, ZeroWeightsLeaveOrg) {
  const RasterImage a = random_image(8, 8, 1);
  const RasterImage b = random_image(8, 8, 2);
  const LossReport r = total_loss(1.625, a, b, b, a, LossWeights{0, 0, 0, 0}, LossConfig{});
  EXPECT_EQ(r.total, 1.625);
  EXPECT_GT(r.rec_pix, 0.0);
}

TEST(LossesTest, TotalIsWeightedSum) {
  const RasterImage a = random_image(8, 8, 1);
  const RasterImage b = random_image(8, 8, 2);
  const LossWeights w{0.5, 2.0, 3.0, 0.25};
  const LossReport r = total_loss(-0.1, a, b, a, b, w, LossConfig{});
  EXPECT_NEAR(r.total,
              -0.1 + 0.5 * r.rec_pix + 2.0 * r.trans_pix + 3.0 * r.rec_fft + 0.25 * r.trans_fft,
              1e-12);
  EXPECT_THROW(total_loss(0, a, b, a, b, LossWeights{-1, 1, 1, 1}, LossConfig{}), Error);
}

TEST(LossesTest, DcShiftClosedForms) {
  const LossConfig cfg = small_config();
  for (double c : {-0.3, 0.1, 0.5}) {
    const RasterImage x = random_image(10, 10, 42);
    const RasterImage y = testing::add_constant(x, c);
    EXPECT_LE(trans_pix_loss(x, y, cfg), 1e-12);
    EXPECT_NEAR(rec_pix_loss(x, y, cfg), std::abs(c), 1e-12);
  }
}

TEST(LossesTest, RecFftConstantClosedForm) {
  const LossConfig cfg;
  for (auto [h, w] : {std::pair{4, 4}, std::pair{5, 7}}) {
    const double c = 0.6;
    const double expected = std::abs(std::log((1 + c + 1e-8) / (1 + 1e-8))) / (h * w);
    EXPECT_NEAR(rec_fft_loss(RasterImage(h, w), RasterImage(h, w, c), cfg), expected, 1e-12);
  }
}

TEST(LossesTest, TransFftVanishesWithEmptyHighRegion) {
  LossConfig cfg;
  cfg.radius = 1000.0;
  EXPECT_EQ(trans_fft_loss(random_image(8, 8, 1), random_image(8, 8, 2), cfg), 0.0);
}

TEST(LossesTest, PseudoMetricSymmetry) {
  const LossConfig cfg;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RasterImage a = random_image(12, 9, seed);
    const RasterImage b = random_image(12, 9, seed + 10);
    for (LossTerm t : kAllLossTerms) {
      const double ab = evaluate_term(t, a, b, cfg);
      EXPECT_GE(ab, 0.0);
      EXPECT_NEAR(ab, evaluate_term(t, b, a, cfg), 1e-12) << to_string(t);
    }
  }
}

TEST(LossesTest, PixelTermsAreHomogeneousFftTermsAreNot) {
  const LossConfig cfg;
  const RasterImage a = random_image(10, 10, 5);
  const RasterImage b = random_image(10, 10, 6);
  for (double alpha : {-2.0, 0.5, 3.0}) {
    RasterImage sa = a;
    RasterImage sb = b;
    for (double& v : sa.values()) v *= alpha;
    for (double& v : sb.values()) v *= alpha;
    EXPECT_NEAR(rec_pix_loss(sa, sb, cfg), std::abs(alpha) * rec_pix_loss(a, b, cfg), 1e-12);
    EXPECT_NEAR(trans_pix_loss(sa, sb, cfg), std::abs(alpha) * trans_pix_loss(a, b, cfg), 1e-12);
    if (alpha != 1.0) {
      EXPECT_GT(std::abs(rec_fft_loss(sa, sb, cfg) - std::abs(alpha) * rec_fft_loss(a, b, cfg)),
                1e-6);
      EXPECT_GT(
          std::abs(trans_fft_loss(sa, sb, cfg) - std::abs(alpha) * trans_fft_loss(a, b, cfg)),
          1e-6);
    }
  }
}

TEST(LossesTest, DimensionMismatch) {
  const RasterImage a(4, 4);
  const RasterImage b(4, 5);
  for (LossTerm t : kAllLossTerms) {
    try {
      evaluate_term(t, a, b, LossConfig{});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kDimMismatch);
    }
  }
}

TEST(LossesTest, BatchAveragesTermwise) {
  const LossConfig cfg = small_config();
  std::vector<LossSample> batch;
  for (int i = 0; i < 3; ++i) {
    batch.push_back({random_image(8, 8, i), random_image(8, 8, i + 10), random_image(8, 8, i + 20),
                     random_image(8, 8, i + 30)});
  }
  const LossReport r = total_loss_batch(0.5, batch, LossWeights{}, cfg);
  double rp = 0.0;
  double tf = 0.0;
  for (const auto& s : batch) {
    rp += rec_pix_loss(s.x, s.x_gen, cfg);
    tf += trans_fft_loss(s.x_source, s.x_trans, cfg);
  }
  EXPECT_NEAR(r.rec_pix, rp / 3.0, 1e-12);
  EXPECT_NEAR(r.trans_fft, tf / 3.0, 1e-12);

  std::vector<LossSample> repeated(4, batch[0]);
  const LossReport single = total_loss(0.5, batch[0].x, batch[0].x_gen, batch[0].x_source,
                                       batch[0].x_trans, LossWeights{}, cfg);
  const LossReport rep = total_loss_batch(0.5, repeated, LossWeights{}, cfg);
  for (LossTerm t : kAllLossTerms) EXPECT_NEAR(rep.term(t), single.term(t), 1e-12);
  EXPECT_THROW(total_loss_batch(0.0, std::vector<LossSample>{}, LossWeights{}, cfg), Error);
}

TEST(LossesTest, JsonReport) {
  const LossConfig cfg;
  const LossReport r = total_loss(0.0, random_image(8, 8, 1), random_image(8, 8, 2),
                                  random_image(8, 8, 3), random_image(8, 8, 4), LossWeights{}, cfg);
  const auto j = to_json(r, cfg, LossWeights{}, cfg.mask_for(8, 8).radius());
  EXPECT_EQ(j.at("rec_fft").get<double>(), r.rec_fft);
  EXPECT_EQ(j.at("total").get<double>(), r.total);
  EXPECT_EQ(j.at("config").at("k").get<int>(), 21);
  EXPECT_EQ(j.at("config").at("mode").get<std::string>(), "literal");
  EXPECT_EQ(j.at("config").at("radius").get<double>(), 21.0 * 8 / 256);
  EXPECT_EQ(j.at("config").at("lambdas").size(), 4u);
  const auto back = nlohmann::json::parse(dump_json(j));
  EXPECT_EQ(back, j);
}

TEST(LossesTest, JsonWriterKeepsSeventeenDigits) {
  const nlohmann::json j = {{"a", 0.1}, {"b", {1.0 / 3.0, 2}}, {"c", "x"}, {"d", nullptr}};
  EXPECT_EQ(dump_json(j, -1),
            R"({"a":0.10000000000000001,"b":[0.33333333333333331,2],"c":"x","d":null})");
  EXPECT_EQ(nlohmann::json::parse(dump_json(j)), j);
}

}  // namespace
}  // namespace freqid
