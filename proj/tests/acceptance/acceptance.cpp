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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "test_util.hpp"

namespace {

using namespace freqid;
using testing::random_gray;
using testing::random_image;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

template <typename A, typename B>
double dot(const A& a, const B& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.values()[i] * b.values()[i];
  return acc;
}

Outcome dft_oracle() {
  double worst = 0.0;
  std::uint64_t seed = 0;
  for (int n : {2, 3, 4, 8, 15, 16, 17, 32}) {
    const GrayImage img = random_gray(n, n, seed++);
    worst = std::max(worst, testing::max_rel_spectrum_diff(dft2(img), naive_dft2(img)));
  }
  return {worst <= 1e-10, "max rel err " + fmt("%.3g", worst)};
}

Outcome parseval() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int h = 1 + static_cast<int>((seed * 37 + 5) % 64);
    const int w = 1 + static_cast<int>((seed * 23 + 11) % 64);
    const GrayImage x = random_gray(h, w, seed + 500);
    double spatial = 0.0;
    for (double v : x.values()) spatial += v * v;
    double spectral = 0.0;
    const Spectrum f = dft2(x);
    for (Complex v : f.values()) spectral += std::norm(v);
    const double expected = spatial / (static_cast<double>(h) * w);
    worst = std::max(worst, std::abs(spectral - expected) / expected);
  }
  return {worst <= 1e-10, "max rel err " + fmt("%.3g", worst)};
}

Outcome decomposition_identity() {
  std::vector<RasterImage> images;
  for (std::uint64_t seed = 0; seed < 5; ++seed) images.push_back(random_image(17 + seed, 23, seed));
  for (const auto& p : testing::photo_paths()) images.push_back(load_image(p));
  double worst = 0.0;
  for (int ks : {3, 9, 21}) {
    const GaussianKernel k = build_kernel(ks);
    for (const auto& x : images) {
      const GrayImage gray = rgb_to_gray(x);
      const GrayImage high = decompose(x, k).high;
      const GrayImage low = blur(gray, k);
      for (std::size_t i = 0; i < gray.size(); ++i) {
        worst = std::max(worst, std::abs(high.values()[i] + low.values()[i] - gray.values()[i]));
      }
    }
  }
  return {worst <= 1e-12, "max abs err " + fmt("%.3g", worst) + " over " +
                              std::to_string(images.size()) + " images"};
}

Outcome kernel_contract() {
  double worst_sum = 0.0;
  double worst_sep = 0.0;
  bool symmetric = true;
  for (int size = 3; size <= 31; size += 2) {
    const GaussianKernel k = build_kernel(size);
    double sum = 0.0;
    for (double v : k.weights()) sum += v;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    const int h = k.radius();
    for (int m = -h; m <= h; ++m) {
      for (int n = -h; n <= h; ++n) {
        symmetric = symmetric && k.weight(m, n) == k.weight(-m, n) &&
                    k.weight(m, n) == k.weight(m, -n) && k.weight(m, n) == k.weight(n, m);
        worst_sep = std::max(worst_sep,
                             std::abs(k.weight(m, n) - k.profile()[m + h] * k.profile()[n + h]));
      }
    }
  }
  return {worst_sum <= 1e-12 && worst_sep <= 1e-12 && symmetric,
          "sum err " + fmt("%.3g", worst_sum) + ", outer-product err " + fmt("%.3g", worst_sep) +
              (symmetric ? ", symmetric" : ", ASYMMETRIC")};
}

Outcome loss_zero_identity() {
  const LossConfig cfg;
  double worst = 0.0;
  bool exact_org = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RasterImage x = random_image(32, 24, seed);
    for (LossTerm t : kAllLossTerms) worst = std::max(worst, std::abs(evaluate_term(t, x, x, cfg)));
    const RasterImage y = random_image(32, 24, seed + 50);
    const double org = 0.1 * static_cast<double>(seed) + 0.3;
    exact_org = exact_org && total_loss(org, x, y, y, x, LossWeights{0, 0, 0, 0}, cfg).total == org;
  }
  return {worst <= 1e-12 && exact_org,
          "max term " + fmt("%.3g", worst) + (exact_org ? ", total == org" : ", total != org")};
}

Outcome dc_shift() {
  const LossConfig cfg;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RasterImage x = random_image(24, 24, seed + 900);
    for (double c : {-0.3, 0.1, 0.5}) {
      worst = std::max(worst, trans_pix_loss(x, testing::add_constant(x, c), cfg));
    }
  }
  return {worst <= 1e-10, "max trans_pix " + fmt("%.3g", worst)};
}

Outcome gradients() {
  const LossConfig cfg;
  double worst_fd = 0.0;
  int checked = 0;
  int skipped = 0;
  bool every_term_checked = true;
  for (LossTerm term : kAllLossTerms) {
    int term_checked = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const FdReport r = finite_diff_check(term, random_image(6, 6, seed), random_image(6, 6, seed + 100), cfg);
      worst_fd = std::max(worst_fd, r.max_rel_err);
      term_checked += r.checked_coords;
      skipped += r.skipped_coords;
    }
    every_term_checked = every_term_checked && term_checked > 0;
    checked += term_checked;
  }

  double worst_adj = 0.0;
  const GaussianKernel k = build_kernel(21);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RasterImage u = random_image(6, 6, seed);
    const RasterImage v = random_image(6, 6, seed + 10);
    const GrayImage g = random_gray(6, 6, seed + 20);
    worst_adj = std::max(worst_adj, std::abs(dot(blur(u, k), v) - dot(u, blur_adjoint(v, k))));
    worst_adj = std::max(worst_adj, std::abs(dot(rgb_to_gray(u), g) - dot(u, rgb_to_gray_adjoint(g))));
    // Real view of the DFT: <Re F x, a> + <Im F x, b> = <x, Re dft2(conj(a + ib))>.
    const GrayImage x = random_gray(6, 6, seed + 30);
    const GrayImage a = random_gray(6, 6, seed + 40);
    const GrayImage b = random_gray(6, 6, seed + 50);
    const Spectrum f = dft2(x);
    Grid<Complex> z(6, 6);
    double lhs = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      lhs += f.values()[i].real() * a.values()[i] + f.values()[i].imag() * b.values()[i];
      z.values()[i] = Complex(a.values()[i], -b.values()[i]);
    }
    const Spectrum back = dft2(z);
    double rhs = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) rhs += x.values()[i] * back.values()[i].real();
    worst_adj = std::max(worst_adj, std::abs(lhs - rhs));
  }
  return {worst_fd <= 1e-4 && worst_adj <= 1e-10 && every_term_checked,
          "fd max rel err " + fmt("%.3g", worst_fd) + " (" + std::to_string(checked) + " checked, " +
              std::to_string(skipped) + " near kinks), adjoint err " + fmt("%.3g", worst_adj)};
}

Outcome mask_energy() {
  const auto photos = testing::photo_paths();
  double lo = 1.0;
  double hi = 0.0;
  double sum = 0.0;
  bool sizes_ok = true;
  for (const auto& p : photos) {
    const RasterImage img = load_image(p);
    sizes_ok = sizes_ok && img.height() == 256 && img.width() == 256;
    const double f = low_energy_fraction(dft2(rgb_to_gray(img)), build_mask(256, 256, 21.0));
    lo = std::min(lo, f);
    hi = std::max(hi, f);
    sum += f;
  }
  const double mean = sum / static_cast<double>(photos.size());
  return {photos.size() >= 5 && sizes_ok && lo >= 0.90 && hi <= 0.995 && mean >= 0.93 && mean <= 0.99,
          std::to_string(photos.size()) + " photos, range [" + fmt("%.4f", lo) + ", " +
              fmt("%.4f", hi) + "], mean " + fmt("%.4f", mean)};
}

Outcome kernel_trend() {
  // Every bundled photo must show both trends.
  bool ok = true;
  std::string detail;
  for (const auto& p : testing::photo_paths()) {
    const RasterImage img = load_image(p);
    const GrayImage gray = rgb_to_gray(img);
    const RadialMask mask = build_mask(gray.height(), gray.width(), 21.0);
    double prev_l1 = -1.0;
    double prev_high = 2.0;
    for (int ks : {9, 21, 41}) {
      const GaussianKernel k = build_kernel(ks);
      double l1 = 0.0;
      const GrayImage band = high_freq(img, k);
      for (double v : band.values()) l1 += std::abs(v);
      const double high = high_energy_fraction(dft2(blur(gray, k)), mask);
      ok = ok && l1 > prev_l1 && high < prev_high;
      prev_l1 = l1;
      prev_high = high;
    }
    if (detail.empty()) {
      detail = p.stem().string() + " k=41: high-band L1 " + fmt("%.1f", prev_l1) +
               ", blurred high-region fraction " + fmt("%.3g", prev_high);
    }
  }
  return {ok, detail};
}

Outcome metrics() {
  bool ok = true;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RasterImage a = random_image(16 + seed % 4, 18, seed);
    const RasterImage b = random_image(a.height(), a.width(), seed + 40);
    ok = ok && std::abs(ssim(a, a) - 1.0) <= 1e-12 && std::isinf(psnr(a, a));
    double sq = 0.0;
    double ab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a.values()[i] - b.values()[i];
      sq += d * d;
      ab += std::abs(d);
    }
    const double n = static_cast<double>(a.size());
    worst = std::max({worst, std::abs(mse(a, b) - sq / n), std::abs(mae(a, b) - ab / n),
                      std::abs(ssim(a, b) - testing::brute_ssim(a, b))});
    ok = ok && std::isfinite(psnr(a, b));
  }
  return {ok && worst <= 1e-8, "max oracle err " + fmt("%.3g", worst) +
                                   (ok ? ", identity and +inf sentinel hold" : ", sentinel FAILED")};
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = testing::scratch_dir("acceptance_batch");
  fs::create_directories(dir / "a");
  fs::create_directories(dir / "b");
  for (int i = 0; i < 10; ++i) {
    const std::string name = "pair" + std::to_string(i) + ".png";
    save_image(random_image(48, 40, 300 + i), dir / "a" / name);
    save_image(random_image(48, 40, 400 + i), dir / "b" / name);
  }
  bool ok = true;
  for (const char* mode : {"loss", "metrics"}) {
    const std::string base = "batch " + testing::q(dir / "a") + " " + testing::q(dir / "b") +
                             " --mode " + mode + " -o ";
    const fs::path j1 = dir / (std::string(mode) + "_j1");
    const fs::path j8 = dir / (std::string(mode) + "_j8");
    ok = ok && testing::run_cli(base + testing::q(j1) + " --jobs 1").exit_code == 0;
    ok = ok && testing::run_cli(base + testing::q(j8) + " --jobs 8").exit_code == 0;
    for (const char* file : {"batch.csv", "summary.json"}) {
      const std::string x = testing::slurp(j1 / file);
      ok = ok && !x.empty() && x == testing::slurp(j8 / file);
    }
  }
  return {ok, ok ? "batch.csv and summary.json byte-identical for loss and metrics modes"
                 : "outputs differ or a run failed"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"C1 dft matches naive oracle", dft_oracle},
      {"C2 parseval", parseval},
      {"C3 decomposition identity", decomposition_identity},
      {"C4 kernel contract", kernel_contract},
      {"C5 loss zero identity", loss_zero_identity},
      {"C6 dc-shift invariance", dc_shift},
      {"C7 gradient correctness", gradients},
      {"C8 mask energy on photos", mask_energy},
      {"C9 kernel-size trends", kernel_trend},
      {"C10 metrics", metrics},
      {"C11 batch determinism", cli_determinism},
  };
  const std::vector<double> budget_s = {10, 60, 60, 60, 60, 60, 60, 60, 60, 60, 120};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > budget_s[i]) {
      o.pass = false;
      o.detail += ", over time budget";
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
