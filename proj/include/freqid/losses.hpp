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

// Frequency-consistency loss terms for image translation.
//
//   rec_pix   = mean|x_L - y_L| + mean|x_H - y_H|       (reconstruction pair)
//   trans_pix = mean|x_H - y_H|                         (translation pair)
//   rec_fft   = mean over channels and bins |S(x_c) - S(y_c)|
//   trans_fft = mean over bins |(S(gray x) - S(gray y)) * M_high|
//
// S is the log spectrum of the forward-normalized DFT. Every norm is reduced
// by the mean over its elements; the masked term keeps masked-out bins in the
// denominator so its scale does not depend on the radius. The base loss of
// the host model is an external scalar.

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "freqid/decompose.hpp"
#include "freqid/error.hpp"
#include "freqid/fourier.hpp"
#include "freqid/gaussian.hpp"
#include "freqid/image.hpp"
#include "freqid/mask.hpp"

namespace freqid {

enum class LossTerm { kRecPix, kTransPix, kRecFft, kTransFft };

inline constexpr std::array<LossTerm, 4> kAllLossTerms = {LossTerm::kRecPix, LossTerm::kTransPix,
                                                          LossTerm::kRecFft, LossTerm::kTransFft};

inline std::string to_string(LossTerm term) {
  switch (term) {
    case LossTerm::kRecPix: return "rec_pix";
    case LossTerm::kTransPix: return "trans_pix";
    case LossTerm::kRecFft: return "rec_fft";
    case LossTerm::kTransFft: return "trans_fft";
  }
  return "unknown";
}

inline LossTerm parse_loss_term(const std::string& s) {
  for (LossTerm t : kAllLossTerms) {
    if (to_string(t) == s) return t;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown loss term '" + s + "'");
}

struct LossWeights {
  double rec_pix = 1.0;
  double trans_pix = 1.0;
  double rec_fft = 1.0;
  double trans_fft = 1.0;

  void validate() const {
    for (double v : {rec_pix, trans_pix, rec_fft, trans_fft}) {
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::kInvalidArgument, "loss weights must be finite and >= 0");
      }
    }
  }

  double of(LossTerm term) const {
    switch (term) {
      case LossTerm::kRecPix: return rec_pix;
      case LossTerm::kTransPix: return trans_pix;
      case LossTerm::kRecFft: return rec_fft;
      case LossTerm::kTransFft: return trans_fft;
    }
    return 0.0;
  }
};

struct LossConfig {
  GaussianKernel kernel = build_kernel(21);
  double epsilon = kDefaultEpsilon;
  SpectrumMode spectrum_mode = SpectrumMode::kLiteral;
  /// Mask radius; the resolution-scaled default is used when empty.
  std::optional<double> radius;
  GrayCoefficients gray;

  RadialMask mask_for(int height, int width) const { return build_mask(height, width, radius); }
};

struct LossReport {
  double rec_pix = 0.0;
  double trans_pix = 0.0;
  double rec_fft = 0.0;
  double trans_fft = 0.0;
  double org = 0.0;
  double total = 0.0;

  double term(LossTerm t) const {
    switch (t) {
      case LossTerm::kRecPix: return rec_pix;
      case LossTerm::kTransPix: return trans_pix;
      case LossTerm::kRecFft: return rec_fft;
      case LossTerm::kTransFft: return trans_fft;
    }
    return 0.0;
  }
};

namespace detail {

inline double mean_abs_diff(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / static_cast<double>(a.size());
}

inline std::array<LogSpectrum, 3> channel_log_spectra(const RasterImage& img,
                                                      const LossConfig& cfg) {
  std::array<LogSpectrum, 3> out;
  for (int ch = 0; ch < 3; ++ch) {
    out[ch] = log_real_spectrum(dft2(channel(img, ch)), cfg.epsilon, cfg.spectrum_mode);
  }
  return out;
}

inline LogSpectrum gray_log_spectrum(const RasterImage& img, const LossConfig& cfg) {
  return log_real_spectrum(dft2(rgb_to_gray(img, cfg.gray)), cfg.epsilon, cfg.spectrum_mode);
}

}  // namespace detail

/// Pairwise (cascade) summation in a fixed order.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
  const std::size_t mid = v.size() / 2;
  return pairwise_sum(v.first(mid)) + pairwise_sum(v.subspan(mid));
}

inline double rec_pix_loss(const RasterImage& x, const RasterImage& x_gen, const LossConfig& cfg) {
  require_same_shape(x, x_gen, "rec_pix_loss");
  const FreqPair a = decompose(x, cfg.kernel, cfg.gray);
  const FreqPair b = decompose(x_gen, cfg.kernel, cfg.gray);
  return detail::mean_abs_diff(a.low.values(), b.low.values()) +
         detail::mean_abs_diff(a.high.values(), b.high.values());
}

inline double trans_pix_loss(const RasterImage& x_source, const RasterImage& x_trans,
                             const LossConfig& cfg) {
  require_same_shape(x_source, x_trans, "trans_pix_loss");
  const GrayImage a = high_freq(x_source, cfg.kernel, cfg.gray);
  const GrayImage b = high_freq(x_trans, cfg.kernel, cfg.gray);
  return detail::mean_abs_diff(a.values(), b.values());
}

inline double rec_fft_loss(const RasterImage& x, const RasterImage& x_gen, const LossConfig& cfg) {
  require_same_shape(x, x_gen, "rec_fft_loss");
  const auto a = detail::channel_log_spectra(x, cfg);
  const auto b = detail::channel_log_spectra(x_gen, cfg);
  double acc = 0.0;
  for (int ch = 0; ch < 3; ++ch) {
    acc += detail::mean_abs_diff(a[ch].values(), b[ch].values());
  }
  return acc / 3.0;
}

inline double trans_fft_loss(const RasterImage& x_source, const RasterImage& x_trans,
                             const LossConfig& cfg) {
  require_same_shape(x_source, x_trans, "trans_fft_loss");
  const RadialMask mask = cfg.mask_for(x_source.height(), x_source.width());
  const LogSpectrum a = apply_mask(detail::gray_log_spectrum(x_source, cfg), mask, MaskRegion::kHigh);
  const LogSpectrum b = apply_mask(detail::gray_log_spectrum(x_trans, cfg), mask, MaskRegion::kHigh);
  return detail::mean_abs_diff(a.values(), b.values());
}

inline double evaluate_term(LossTerm term, const RasterImage& ref, const RasterImage& var,
                            const LossConfig& cfg) {
  switch (term) {
    case LossTerm::kRecPix: return rec_pix_loss(ref, var, cfg);
    case LossTerm::kTransPix: return trans_pix_loss(ref, var, cfg);
    case LossTerm::kRecFft: return rec_fft_loss(ref, var, cfg);
    case LossTerm::kTransFft: return trans_fft_loss(ref, var, cfg);
  }
  return 0.0;
}

inline void finalize_total(LossReport& r, const LossWeights& w) {
  r.total = r.org + w.rec_pix * r.rec_pix + w.trans_pix * r.trans_pix + w.rec_fft * r.rec_fft +
            w.trans_fft * r.trans_fft;
}

/// Full objective for one sample: (x, x_gen) is the reconstruction pair and
/// (x_source, x_trans) the translation pair.
inline LossReport total_loss(double org, const RasterImage& x, const RasterImage& x_gen,
                             const RasterImage& x_source, const RasterImage& x_trans,
                             const LossWeights& w, const LossConfig& cfg) {
  w.validate();
  LossReport r;
  r.org = org;
  r.rec_pix = rec_pix_loss(x, x_gen, cfg);
  r.trans_pix = trans_pix_loss(x_source, x_trans, cfg);
  r.rec_fft = rec_fft_loss(x, x_gen, cfg);
  r.trans_fft = trans_fft_loss(x_source, x_trans, cfg);
  finalize_total(r, w);
  return r;
}

struct LossSample {
  RasterImage x;
  RasterImage x_gen;
  RasterImage x_source;
  RasterImage x_trans;
};

/// Batch objective: every term is averaged over the samples before weighting.
inline LossReport total_loss_batch(double org, std::span<const LossSample> batch,
                                   const LossWeights& w, const LossConfig& cfg) {
  if (batch.empty()) throw Error(ErrorCode::kInvalidArgument, "empty batch");
  w.validate();
  std::array<std::vector<double>, 4> per_term;
  for (const LossSample& s : batch) {
    const LossReport r = total_loss(0.0, s.x, s.x_gen, s.x_source, s.x_trans, w, cfg);
    for (std::size_t t = 0; t < 4; ++t) per_term[t].push_back(r.term(kAllLossTerms[t]));
  }
  const double n = static_cast<double>(batch.size());
  LossReport out;
  out.org = org;
  out.rec_pix = pairwise_sum(per_term[0]) / n;
  out.trans_pix = pairwise_sum(per_term[1]) / n;
  out.rec_fft = pairwise_sum(per_term[2]) / n;
  out.trans_fft = pairwise_sum(per_term[3]) / n;
  finalize_total(out, w);
  return out;
}

}  // namespace freqid
