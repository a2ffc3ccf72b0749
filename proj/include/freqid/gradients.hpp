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

// Analytic (sub)gradients of the loss terms with respect to the generated
// image, and a central-difference checker.
//
// Conventions:
//   d|u|/du = sign(u), with sign(0) = 0.
//   blur^T      scatter form of the reflect-padded correlation.
//   gray^T      broadcast of the luma coefficients.
//   DFT^T       for the real view (Re F, Im F) of the forward-normalized
//               DFT, the pullback of a cotangent Z = gRe + i gIm is
//               Re(DFT(conj Z)); the 1/(HW) factor is carried by DFT.
//   log spectrum, literal mode:
//               dS/dRe = sign(Re) / (1 + |Re| + |Im| + eps), same for Im.
//   log spectrum, euclidean mode:
//               dS/dRe = Re / (|F| (1 + |F| + eps)), zero at |F| = 0.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "freqid/decompose.hpp"
#include "freqid/fourier.hpp"
#include "freqid/gaussian.hpp"
#include "freqid/image.hpp"
#include "freqid/losses.hpp"
#include "freqid/mask.hpp"

namespace freqid {

/// d(loss)/d(pixel), same layout as the differentiated RasterImage.
class GradientField : public RasterImage {
 public:
  using RasterImage::RasterImage;
  GradientField(RasterImage img) : RasterImage(std::move(img)) {}
};

namespace detail {

inline double sign(double u) { return static_cast<double>((u > 0.0) - (u < 0.0)); }

inline void add_into(std::span<double> acc, std::span<const double> v, double scale = 1.0) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += scale * v[i];
}

// Pullback through (I - blur): g - blur^T g.
inline GrayImage high_pass_adjoint(const GrayImage& g, const GaussianKernel& kernel) {
  GrayImage out = g;
  add_into(out.values(), blur_adjoint(g, kernel).values(), -1.0);
  return out;
}

// Pullback of a cotangent on the log spectrum to the real input grid.
inline GrayImage log_spectrum_adjoint(const Spectrum& f, const Grid<double>& d_log,
                                      double epsilon, SpectrumMode mode) {
  Grid<Complex> z(f.height(), f.width());
  auto fv = f.values();
  auto dv = d_log.values();
  auto zv = z.values();
  for (std::size_t i = 0; i < fv.size(); ++i) {
    if (dv[i] == 0.0) continue;
    const double re = fv[i].real();
    const double im = fv[i].imag();
    double g_re = 0.0;
    double g_im = 0.0;
    if (mode == SpectrumMode::kLiteral) {
      const double inv = 1.0 / (1.0 + std::abs(re) + std::abs(im) + epsilon);
      g_re = dv[i] * sign(re) * inv;
      g_im = dv[i] * sign(im) * inv;
    } else {
      const double mag = std::abs(fv[i]);
      if (mag > 0.0) {
        const double s = dv[i] / (mag * (1.0 + mag + epsilon));
        g_re = s * re;
        g_im = s * im;
      }
    }
    // DFT(conj Z) below.
    zv[i] = Complex(g_re, -g_im);
  }
  const Spectrum back = dft2(z);
  GrayImage out(f.height(), f.width());
  auto bv = back.values();
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = bv[i].real();
  return out;
}

inline GradientField grad_rec_pix(const RasterImage& ref, const RasterImage& var,
                                  const LossConfig& cfg, bool include_low) {
  const double hw = static_cast<double>(ref.height()) * ref.width();
  GradientField out(ref.height(), ref.width());
  if (include_low) {
    const RasterImage low_ref = low_freq(ref, cfg.kernel);
    const RasterImage low_var = low_freq(var, cfg.kernel);
    RasterImage d(ref.height(), ref.width());
    auto a = low_ref.values();
    auto b = low_var.values();
    auto dv = d.values();
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = -sign(a[i] - b[i]) / (3.0 * hw);
    add_into(out.values(), blur_adjoint(d, cfg.kernel).values());
  }
  const GrayImage high_ref = high_freq(ref, cfg.kernel, cfg.gray);
  const GrayImage high_var = high_freq(var, cfg.kernel, cfg.gray);
  GrayImage d(ref.height(), ref.width());
  auto a = high_ref.values();
  auto b = high_var.values();
  auto dv = d.values();
  for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = -sign(a[i] - b[i]) / hw;
  add_into(out.values(),
           rgb_to_gray_adjoint(high_pass_adjoint(d, cfg.kernel), cfg.gray).values());
  return out;
}

inline GradientField grad_rec_fft(const RasterImage& ref, const RasterImage& var,
                                  const LossConfig& cfg) {
  const double n = 3.0 * ref.height() * ref.width();
  std::array<GrayImage, 3> planes;
  for (int ch = 0; ch < 3; ++ch) {
    const Spectrum f_var = dft2(channel(var, ch));
    const LogSpectrum s_var = log_real_spectrum(f_var, cfg.epsilon, cfg.spectrum_mode);
    const LogSpectrum s_ref =
        log_real_spectrum(dft2(channel(ref, ch)), cfg.epsilon, cfg.spectrum_mode);
    Grid<double> d(ref.height(), ref.width());
    auto a = s_ref.values();
    auto b = s_var.values();
    auto dv = d.values();
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = -sign(a[i] - b[i]) / n;
    planes[ch] = log_spectrum_adjoint(f_var, d, cfg.epsilon, cfg.spectrum_mode);
  }
  return merge_channels(planes);
}

inline GradientField grad_trans_fft(const RasterImage& ref, const RasterImage& var,
                                    const LossConfig& cfg) {
  const int h = ref.height();
  const int w = ref.width();
  const double hw = static_cast<double>(h) * w;
  const RadialMask mask = cfg.mask_for(h, w);
  const Spectrum f_var = dft2(rgb_to_gray(var, cfg.gray));
  const LogSpectrum s_var = log_real_spectrum(f_var, cfg.epsilon, cfg.spectrum_mode);
  const LogSpectrum s_ref =
      log_real_spectrum(dft2(rgb_to_gray(ref, cfg.gray)), cfg.epsilon, cfg.spectrum_mode);
  Grid<double> d(h, w);
  for (int a = 0; a < h; ++a) {
    for (int b = 0; b < w; ++b) {
      if (mask.in_region(a, b, MaskRegion::kHigh)) d(a, b) = -sign(s_ref(a, b) - s_var(a, b)) / hw;
    }
  }
  return rgb_to_gray_adjoint(log_spectrum_adjoint(f_var, d, cfg.epsilon, cfg.spectrum_mode),
                             cfg.gray);
}

}  // namespace detail

/// Gradient of term(x_ref, x_var) with respect to x_var.
inline GradientField grad(LossTerm term, const RasterImage& x_ref, const RasterImage& x_var,
                          const LossConfig& cfg) {
  require_same_shape(x_ref, x_var, "grad");
  switch (term) {
    case LossTerm::kRecPix: return detail::grad_rec_pix(x_ref, x_var, cfg, true);
    case LossTerm::kTransPix: return detail::grad_rec_pix(x_ref, x_var, cfg, false);
    case LossTerm::kRecFft: return detail::grad_rec_fft(x_ref, x_var, cfg);
    case LossTerm::kTransFft: return detail::grad_trans_fft(x_ref, x_var, cfg);
  }
  return GradientField(x_ref.height(), x_ref.width());
}

/// Gradients of the weighted objective. The reconstruction terms depend on
/// x_gen, the translation terms on x_trans.
struct TotalGradient {
  GradientField wrt_gen;
  GradientField wrt_trans;
};

inline TotalGradient total_grad(const RasterImage& x, const RasterImage& x_gen,
                                const RasterImage& x_source, const RasterImage& x_trans,
                                const LossWeights& w, const LossConfig& cfg) {
  w.validate();
  TotalGradient out{GradientField(x.height(), x.width()),
                    GradientField(x_source.height(), x_source.width())};
  detail::add_into(out.wrt_gen.values(), grad(LossTerm::kRecPix, x, x_gen, cfg).values(),
                   w.rec_pix);
  detail::add_into(out.wrt_gen.values(), grad(LossTerm::kRecFft, x, x_gen, cfg).values(),
                   w.rec_fft);
  detail::add_into(out.wrt_trans.values(),
                   grad(LossTerm::kTransPix, x_source, x_trans, cfg).values(), w.trans_pix);
  detail::add_into(out.wrt_trans.values(),
                   grad(LossTerm::kTransFft, x_source, x_trans, cfg).values(), w.trans_fft);
  return out;
}

/// Every quantity that passes through a sign() on the way from x_var to the
/// loss. A coordinate is near a kink when one of these that depends on it is
/// close to zero.
inline std::vector<double> kink_arguments(LossTerm term, const RasterImage& x_ref,
                                          const RasterImage& x_var, const LossConfig& cfg) {
  require_same_shape(x_ref, x_var, "kink_arguments");
  std::vector<double> out;
  auto push_diff = [&out](std::span<const double> a, std::span<const double> b) {
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] - b[i]);
  };
  auto push_spectrum = [&out, &cfg](const Spectrum& f, std::span<const double> s_ref,
                                    std::span<const double> s_var, const RadialMask* mask) {
    for (int a = 0; a < f.height(); ++a) {
      for (int b = 0; b < f.width(); ++b) {
        if (mask && !mask->in_region(a, b, MaskRegion::kHigh)) continue;
        const std::size_t i = static_cast<std::size_t>(a) * f.width() + b;
        out.push_back(s_ref[i] - s_var[i]);
        if (cfg.spectrum_mode == SpectrumMode::kLiteral) {
          out.push_back(f(a, b).real());
          out.push_back(f(a, b).imag());
        } else {
          out.push_back(std::abs(f(a, b)));
        }
      }
    }
  };
  switch (term) {
    case LossTerm::kRecPix:
      push_diff(low_freq(x_ref, cfg.kernel).values(), low_freq(x_var, cfg.kernel).values());
      [[fallthrough]];
    case LossTerm::kTransPix:
      push_diff(high_freq(x_ref, cfg.kernel, cfg.gray).values(),
                high_freq(x_var, cfg.kernel, cfg.gray).values());
      break;
    case LossTerm::kRecFft:
      for (int ch = 0; ch < 3; ++ch) {
        const Spectrum f = dft2(channel(x_var, ch));
        const LogSpectrum s_var = log_real_spectrum(f, cfg.epsilon, cfg.spectrum_mode);
        const LogSpectrum s_ref =
            log_real_spectrum(dft2(channel(x_ref, ch)), cfg.epsilon, cfg.spectrum_mode);
        push_spectrum(f, s_ref.values(), s_var.values(), nullptr);
      }
      break;
    case LossTerm::kTransFft: {
      const RadialMask mask = cfg.mask_for(x_ref.height(), x_ref.width());
      const Spectrum f = dft2(rgb_to_gray(x_var, cfg.gray));
      const LogSpectrum s_var = log_real_spectrum(f, cfg.epsilon, cfg.spectrum_mode);
      const LogSpectrum s_ref =
          log_real_spectrum(dft2(rgb_to_gray(x_ref, cfg.gray)), cfg.epsilon, cfg.spectrum_mode);
      push_spectrum(f, s_ref.values(), s_var.values(), &mask);
      break;
    }
  }
  return out;
}

struct FdReport {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  int checked_coords = 0;
  int skipped_coords = 0;
};

struct FdOptions {
  double h = 1e-5;
  /// A kink argument closer to zero than this is treated as sitting on its
  /// kink regardless of how far the stencil moves it.
  double kink_threshold = 1e-6;
  /// Skip when an argument comes within kink_margin times its own movement
  /// across the stencil of zero.
  double kink_margin = 10.0;
  /// Denominator floor of the relative error, so coordinates whose true
  /// derivative is zero are judged on absolute error.
  double rel_floor = 1e-6;
  /// A kink argument depends on a coordinate when it moves by more than
  /// this across the +-h stencil.
  double dependency_tol = 1e-12;
  /// Flat pixel-buffer indices to check; all of them when empty.
  std::vector<std::size_t> coords;
};

using ScalarLoss = std::function<double(const RasterImage&)>;
using KinkFunction = std::function<std::vector<double>(const RasterImage&)>;

/// Central differences (L(v + h e) - L(v - h e)) / 2h against an analytic
/// gradient. Coordinates that move a kink argument to within reach of zero are
/// skipped.
inline FdReport finite_diff_check(const ScalarLoss& loss, const KinkFunction& kinks,
                                  const RasterImage& x, const GradientField& analytic,
                                  const FdOptions& opt = {}) {
  if (!(opt.h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "h must be positive");
  require_same_shape(x, analytic, "finite_diff_check");
  std::vector<std::size_t> coords = opt.coords;
  if (coords.empty()) {
    coords.resize(x.size());
    for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
  }
  FdReport report;
  const std::vector<double> base_kinks = kinks ? kinks(x) : std::vector<double>{};
  RasterImage probe = x;
  for (std::size_t j : coords) {
    const double v0 = x.values()[j];
    probe.values()[j] = v0 + opt.h;
    const double lp = loss(probe);
    std::vector<double> kp = kinks ? kinks(probe) : std::vector<double>{};
    probe.values()[j] = v0 - opt.h;
    const double lm = loss(probe);
    std::vector<double> km = kinks ? kinks(probe) : std::vector<double>{};
    probe.values()[j] = v0;

    bool near_kink = false;
    for (std::size_t i = 0; i < base_kinks.size() && !near_kink; ++i) {
      if (std::abs(kp[i] - km[i]) <= opt.dependency_tol) continue;
      const double closest = std::min({std::abs(base_kinks[i]), std::abs(kp[i]), std::abs(km[i])});
      const double zone = std::max(opt.kink_threshold, opt.kink_margin * std::abs(kp[i] - km[i]));
      near_kink = closest < zone || (kp[i] > 0.0) != (km[i] > 0.0);
    }
    if (near_kink) {
      ++report.skipped_coords;
      continue;
    }
    const double fd = (lp - lm) / (2.0 * opt.h);
    const double an = analytic.values()[j];
    const double abs_err = std::abs(fd - an);
    const double rel_err = abs_err / std::max({std::abs(fd), std::abs(an), opt.rel_floor});
    report.max_abs_err = std::max(report.max_abs_err, abs_err);
    report.max_rel_err = std::max(report.max_rel_err, rel_err);
    ++report.checked_coords;
  }
  return report;
}

inline FdReport finite_diff_check(LossTerm term, const RasterImage& x_ref,
                                  const RasterImage& x_var, const LossConfig& cfg,
                                  const FdOptions& opt = {}) {
  require_same_shape(x_ref, x_var, "finite_diff_check");
  const GradientField analytic = grad(term, x_ref, x_var, cfg);
  return finite_diff_check(
      [&](const RasterImage& v) { return evaluate_term(term, x_ref, v, cfg); },
      [&](const RasterImage& v) { return kink_arguments(term, x_ref, v, cfg); }, x_var, analytic,
      opt);
}

}  // namespace freqid
