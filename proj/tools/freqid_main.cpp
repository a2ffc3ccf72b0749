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

// freqid command-line tool. Exit codes: 0 ok, 2 usage/validation, 3 I/O.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "freqid/freqid.hpp"

namespace fs = std::filesystem;
using freqid::Error;
using freqid::ErrorCode;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct RunConfig {
  int k = 21;
  std::optional<double> sigma;
  double epsilon = freqid::kDefaultEpsilon;
  std::optional<double> radius;
  std::string spectrum_mode = "literal";
  std::vector<double> lambdas = {1.0, 1.0, 1.0, 1.0};
  std::string output = ".";
  int jobs = 1;

  freqid::LossConfig loss_config() const {
    freqid::LossConfig cfg;
    cfg.kernel = freqid::build_kernel(k, sigma);
    if (!(epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "--epsilon must be positive");
    cfg.epsilon = epsilon;
    cfg.spectrum_mode = freqid::parse_spectrum_mode(spectrum_mode);
    if (radius && !(*radius >= 0.0)) throw Error(ErrorCode::kInvalidRadius, "--radius must be >= 0");
    cfg.radius = radius;
    return cfg;
  }

  freqid::LossWeights weights() const {
    if (lambdas.size() != 4) throw Error(ErrorCode::kInvalidArgument, "--lambdas takes 4 values");
    freqid::LossWeights w{lambdas[0], lambdas[1], lambdas[2], lambdas[3]};
    w.validate();
    return w;
  }
};

void add_config_flags(CLI::App* cmd, RunConfig& rc, bool with_output) {
  cmd->add_option("-k,--kernel-size", rc.k, "Gaussian kernel size (odd, >= 3)")
      ->capture_default_str();
  cmd->add_option("--sigma", rc.sigma, "Gaussian sigma (default (k-1)/6)");
  cmd->add_option("--epsilon", rc.epsilon, "log-spectrum epsilon")->capture_default_str();
  cmd->add_option("--radius", rc.radius, "mask radius (default 21*min(H,W)/256)");
  cmd->add_option("--spectrum-mode", rc.spectrum_mode, "literal or euclidean")
      ->check(CLI::IsMember({"literal", "euclidean"}))
      ->capture_default_str();
  cmd->add_option("--lambdas", rc.lambdas, "rec_pix,trans_pix,rec_fft,trans_fft weights")
      ->delimiter(',')
      ->expected(4);
  if (with_output) {
    cmd->add_option("-o,--output", rc.output, "output directory")->capture_default_str();
  }
}

// Collects output files under temporary names and renames them into place
// only after every write has succeeded.
class AtomicWriter {
 public:
  explicit AtomicWriter(fs::path dir) : dir_(std::move(dir)) {}
  AtomicWriter(const AtomicWriter&) = delete;
  AtomicWriter& operator=(const AtomicWriter&) = delete;
  ~AtomicWriter() {
    std::error_code ec;
    for (const auto& [tmp, dst] : staged_) fs::remove(tmp, ec);
  }

  fs::path stage(const std::string& name) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir_.string() + ": " + ec.message());
    const fs::path dst = dir_ / name;
    const fs::path tmp = dir_ / ("." + name + ".tmp");
    staged_.emplace_back(tmp, dst);
    return tmp;
  }

  void text(const std::string& name, const std::string& content) {
    const fs::path tmp = stage(name);
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.close();
    if (!out) throw Error(ErrorCode::kIoError, "write failed for " + tmp.string());
  }

  void commit() {
    for (const auto& [tmp, dst] : staged_) {
      std::error_code ec;
      fs::rename(tmp, dst, ec);
      if (ec) throw Error(ErrorCode::kIoError, "cannot rename to " + dst.string());
    }
    staged_.clear();
  }

 private:
  fs::path dir_;
  std::vector<std::pair<fs::path, fs::path>> staged_;
};

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double l1(std::span<const double> v) {
  double acc = 0.0;
  for (double e : v) acc += std::abs(e);
  return acc;
}

freqid::GrayImage as_gray(const freqid::Grid<double>& g) {
  return freqid::GrayImage(g.height(), g.width(), std::vector<double>(g.values().begin(), g.values().end()));
}

void print_json(const json& j) { std::cout << freqid::dump_json(j) << "\n"; }

// ---------------------------------------------------------------------------

int cmd_decompose(const std::string& input, const RunConfig& rc) {
  const freqid::LossConfig cfg = rc.loss_config();
  const freqid::RasterImage img = freqid::load_image(input);
  const freqid::FreqPair p = freqid::decompose(img, cfg.kernel);
  const std::string stem = fs::path(input).stem().string();
  const json j = {
      {"input", input},
      {"k", cfg.kernel.size()},
      {"sigma", cfg.kernel.sigma()},
      {"low_l1", l1(p.low.values())},
      {"high_l1", l1(p.high.values())},
  };
  AtomicWriter w(rc.output);
  freqid::save_image(p.low, w.stage(stem + "_low.png"));
  freqid::save_image(freqid::normalize_for_display(p.high), w.stage(stem + "_high.png"));
  w.text(stem + "_decompose.json", freqid::dump_json(j) + "\n");
  w.commit();
  print_json(j);
  return 0;
}

int cmd_spectrum(const std::string& input, const RunConfig& rc) {
  const freqid::LossConfig cfg = rc.loss_config();
  const freqid::RasterImage img = freqid::load_image(input);
  const freqid::LogSpectrum ls = freqid::log_real_spectrum(
      freqid::dft2(freqid::rgb_to_gray(img, cfg.gray)), cfg.epsilon, cfg.spectrum_mode);
  const std::string stem = fs::path(input).stem().string();
  AtomicWriter w(rc.output);
  freqid::save_image(freqid::normalize_for_display(as_gray(freqid::fftshift_view(ls))),
                     w.stage(stem + "_spectrum.png"));
  freqid::write_spectrum_file(ls, w.stage(stem + "_spectrum.fdspec"));
  w.commit();
  print_json({{"input", input},
              {"height", ls.height()},
              {"width", ls.width()},
              {"mode", freqid::to_string(cfg.spectrum_mode)},
              {"epsilon", cfg.epsilon}});
  return 0;
}

int cmd_mask_energy(const std::string& input, const RunConfig& rc, bool save_png) {
  const freqid::LossConfig cfg = rc.loss_config();
  const freqid::RasterImage img = freqid::load_image(input);
  const freqid::GrayImage gray = freqid::rgb_to_gray(img, cfg.gray);
  const freqid::Spectrum spec = freqid::dft2(gray);
  const freqid::RadialMask mask = cfg.mask_for(gray.height(), gray.width());
  const double low = freqid::low_energy_fraction(spec, mask);
  if (save_png) {
    const freqid::LogSpectrum ls = freqid::log_real_spectrum(spec, cfg.epsilon, cfg.spectrum_mode);
    freqid::GrayImage region(gray.height(), gray.width());
    const auto lr = mask.low_region();
    for (std::size_t i = 0; i < region.size(); ++i) region.values()[i] = lr.values()[i];
    const std::string stem = fs::path(input).stem().string();
    AtomicWriter w(rc.output);
    freqid::save_image(region, w.stage(stem + "_mask_low.png"));
    for (auto [region_kind, suffix] : {std::pair{freqid::MaskRegion::kLow, "_spectrum_low.png"},
                                       std::pair{freqid::MaskRegion::kHigh, "_spectrum_high.png"}}) {
      const freqid::LogSpectrum m = freqid::apply_mask(ls, mask, region_kind);
      freqid::save_image(freqid::normalize_for_display(as_gray(freqid::fftshift_view(m))),
                         w.stage(stem + suffix));
    }
    w.commit();
  }
  print_json({{"radius", mask.radius()}, {"low_fraction", low}, {"high_fraction", 1.0 - low}});
  return 0;
}

json loss_json(const freqid::LossReport& r, const std::vector<freqid::LossTerm>& terms,
               const freqid::LossConfig& cfg, const freqid::LossWeights& w, double radius) {
  json j = freqid::to_json(r, cfg, w, radius);
  for (freqid::LossTerm t : freqid::kAllLossTerms) {
    if (std::find(terms.begin(), terms.end(), t) == terms.end()) j[freqid::to_string(t)] = nullptr;
  }
  return j;
}

freqid::LossReport evaluate_terms(const freqid::RasterImage& a, const freqid::RasterImage& b,
                                  const std::vector<freqid::LossTerm>& terms,
                                  const freqid::LossConfig& cfg, const freqid::LossWeights& w) {
  freqid::LossReport r;
  for (freqid::LossTerm t : terms) {
    const double v = freqid::evaluate_term(t, a, b, cfg);
    switch (t) {
      case freqid::LossTerm::kRecPix: r.rec_pix = v; break;
      case freqid::LossTerm::kTransPix: r.trans_pix = v; break;
      case freqid::LossTerm::kRecFft: r.rec_fft = v; break;
      case freqid::LossTerm::kTransFft: r.trans_fft = v; break;
    }
  }
  freqid::finalize_total(r, w);
  return r;
}

std::vector<freqid::LossTerm> terms_for_mode(const std::string& mode) {
  if (mode == "rec") return {freqid::LossTerm::kRecPix, freqid::LossTerm::kRecFft};
  return {freqid::LossTerm::kTransPix, freqid::LossTerm::kTransFft};
}

int cmd_loss(const std::string& source, const std::string& generated, const std::string& mode,
             const RunConfig& rc) {
  const freqid::LossConfig cfg = rc.loss_config();
  const freqid::LossWeights w = rc.weights();
  const freqid::RasterImage a = freqid::load_image(source);
  const freqid::RasterImage b = freqid::load_image(generated);
  freqid::require_same_shape(a, b, "loss (source vs generated)");
  const auto terms = terms_for_mode(mode);
  const freqid::LossReport r = evaluate_terms(a, b, terms, cfg, w);
  json j = loss_json(r, terms, cfg, w, cfg.mask_for(a.height(), a.width()).radius());
  j["mode"] = mode;
  print_json(j);
  return 0;
}

int cmd_metrics(const std::string& path_a, const std::string& path_b, double peak) {
  const freqid::RasterImage a = freqid::load_image(path_a);
  const freqid::RasterImage b = freqid::load_image(path_b);
  freqid::require_same_shape(a, b, "metrics");
  print_json(freqid::to_json(freqid::compute_metrics(a, b, peak), peak));
  return 0;
}

int cmd_grad_check(const std::string& ref_path, const std::string& var_path,
                   const std::string& term_name, int max_coords, std::uint64_t seed,
                   const RunConfig& rc) {
  const freqid::LossConfig cfg = rc.loss_config();
  const freqid::LossTerm term = freqid::parse_loss_term(term_name);
  if (max_coords <= 0) throw Error(ErrorCode::kInvalidArgument, "--max-coords must be positive");
  const freqid::RasterImage ref = freqid::load_image(ref_path);
  const freqid::RasterImage var = freqid::load_image(var_path);
  freqid::require_same_shape(ref, var, "grad-check");
  freqid::FdOptions opt;
  if (var.size() > static_cast<std::size_t>(max_coords)) {
    std::vector<std::size_t> all(var.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    std::mt19937_64 rng(seed);
    std::sample(all.begin(), all.end(), std::back_inserter(opt.coords), max_coords, rng);
  }
  const freqid::FdReport r = freqid::finite_diff_check(term, ref, var, cfg, opt);
  json j = freqid::to_json(r);
  j["term"] = term_name;
  j["h"] = opt.h;
  j["sampled"] = !opt.coords.empty();
  j["config"] = freqid::config_json(cfg, rc.weights(), cfg.mask_for(var.height(), var.width()).radius());
  print_json(j);
  return 0;
}

// --- batch -----------------------------------------------------------------

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm";
}

std::set<std::string> list_images(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::kFileNotFound, "not a directory: " + dir.string());
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(dir, ec)) {
    if (e.is_regular_file() && is_image_file(e.path())) names.insert(e.path().filename().string());
  }
  if (ec) throw Error(ErrorCode::kIoError, "cannot list " + dir.string());
  return names;
}

struct PairResult {
  std::vector<double> values;
  std::optional<Error> error;
};

int cmd_batch(const std::string& dir_a, const std::string& dir_b, const std::string& mode,
              const RunConfig& rc) {
  const freqid::LossConfig cfg = rc.loss_config();
  const freqid::LossWeights w = rc.weights();
  if (rc.jobs < 1) throw Error(ErrorCode::kInvalidArgument, "--jobs must be >= 1");
  const auto names_a = list_images(dir_a);
  const auto names_b = list_images(dir_b);
  std::vector<std::string> pairs;
  json skipped = json::array();
  std::set_intersection(names_a.begin(), names_a.end(), names_b.begin(), names_b.end(),
                        std::back_inserter(pairs));
  for (const auto& n : names_a) {
    if (!names_b.count(n)) skipped.push_back((fs::path(dir_a) / n).string());
  }
  for (const auto& n : names_b) {
    if (!names_a.count(n)) skipped.push_back((fs::path(dir_b) / n).string());
  }
  if (pairs.empty()) throw Error(ErrorCode::kInvalidArgument, "no image pairs matched by filename");

  const bool metrics = mode == "metrics";
  const std::vector<std::string> columns =
      metrics ? std::vector<std::string>{"mse", "mae", "psnr", "ssim"}
              : std::vector<std::string>{"rec_pix", "trans_pix", "rec_fft", "trans_fft", "total"};

  std::vector<PairResult> results(pairs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < pairs.size(); i = next++) {
      try {
        const freqid::RasterImage a = freqid::load_image(fs::path(dir_a) / pairs[i]);
        const freqid::RasterImage b = freqid::load_image(fs::path(dir_b) / pairs[i]);
        freqid::require_same_shape(a, b, pairs[i].c_str());
        if (metrics) {
          const freqid::MetricsReport m = freqid::compute_metrics(a, b);
          results[i].values = {m.mse, m.mae, m.psnr, m.ssim};
        } else {
          const freqid::LossReport r = freqid::total_loss(0.0, a, b, a, b, w, cfg);
          results[i].values = {r.rec_pix, r.trans_pix, r.rec_fft, r.trans_fft, r.total};
        }
      } catch (const Error& e) {
        results[i].error = e;
      }
    }
  };
  const int n_threads = std::min<int>(rc.jobs, static_cast<int>(pairs.size()));
  std::vector<std::thread> threads;
  for (int t = 1; t < n_threads; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  // First failure in sorted order, so the reported error does not depend on scheduling.
  for (const auto& r : results) {
    if (r.error) throw *r.error;
  }

  std::string csv = "path_a,path_b";
  for (const auto& c : columns) csv += "," + c;
  csv += "\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    csv += (fs::path(dir_a) / pairs[i]).string() + "," + (fs::path(dir_b) / pairs[i]).string();
    for (double v : results[i].values) csv += "," + (std::isinf(v) ? std::string("inf") : fmt17(v));
    csv += "\n";
  }

  json means = json::object();
  int identical = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::vector<double> col;
    for (const auto& r : results) col.push_back(r.values[c]);
    const bool has_inf = std::any_of(col.begin(), col.end(), [](double v) { return std::isinf(v); });
    if (columns[c] == "psnr") {
      identical = static_cast<int>(std::count_if(col.begin(), col.end(), [](double v) { return std::isinf(v); }));
    }
    // Mean PSNR is undefined once a pair is identical.
    means[columns[c]] = has_inf ? json(nullptr)
                                : json(freqid::pairwise_sum(col) / static_cast<double>(col.size()));
  }
  json summary = {
      {"mode", mode},
      {"pairs", pairs.size()},
      {"means", means},
      {"skipped", skipped},
  };
  if (metrics) {
    summary["identical_pairs"] = identical;
  } else {
    summary["config"] = freqid::config_json(cfg, w, cfg.radius ? *cfg.radius : -1.0);
    if (!cfg.radius) summary["config"]["radius"] = "default";
  }

  AtomicWriter out(rc.output);
  out.text("batch.csv", csv);
  out.text("summary.json", freqid::dump_json(summary) + "\n");
  out.commit();
  print_json(summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-domain image analysis: band split, log spectra, radial masks, "
               "losses, gradient checks and image metrics.\n"
               "FID is not provided; it needs a pretrained classification network."};
  app.require_subcommand(1);
  RunConfig rc;

  std::string in_a;
  std::string in_b;
  std::string mode;

  auto* decompose = app.add_subcommand("decompose", "write low/high frequency bands as PNG + JSON");
  decompose->add_option("input", in_a, "input image (PNG or PPM)")->required();
  add_config_flags(decompose, rc, true);

  auto* spectrum = app.add_subcommand("spectrum", "write DC-centered log spectrum PNG + raw FDITSPEC grid");
  spectrum->add_option("input", in_a, "input image")->required();
  add_config_flags(spectrum, rc, true);

  bool save_png = false;
  auto* mask_energy = app.add_subcommand("mask-energy", "print low/high spectral energy fractions");
  mask_energy->add_option("input", in_a, "input image")->required();
  mask_energy->add_flag("--save-png", save_png, "also write mask and masked spectra to -o");
  add_config_flags(mask_energy, rc, true);

  auto* loss = app.add_subcommand("loss", "print loss terms for an image pair");
  loss->add_option("source", in_a, "reference image")->required();
  loss->add_option("generated", in_b, "generated image")->required();
  loss->add_option("--mode", mode, "rec or trans")->required()->check(CLI::IsMember({"rec", "trans"}));
  add_config_flags(loss, rc, false);

  auto* batch = app.add_subcommand("batch", "process same-named image pairs from two directories");
  batch->add_option("dir_a", in_a, "reference directory")->required();
  batch->add_option("dir_b", in_b, "comparison directory")->required();
  batch->add_option("--mode", mode, "loss or metrics")->required()->check(CLI::IsMember({"loss", "metrics"}));
  batch->add_option("-j,--jobs", rc.jobs, "worker threads")->capture_default_str();
  add_config_flags(batch, rc, true);

  std::string term;
  int max_coords = 2000;
  std::uint64_t seed = 0;
  auto* grad_check = app.add_subcommand("grad-check", "finite-difference check of a loss gradient");
  grad_check->add_option("reference", in_a, "fixed image")->required();
  grad_check->add_option("variable", in_b, "image the gradient is taken with respect to")->required();
  grad_check->add_option("--term", term, "rec_pix, trans_pix, rec_fft or trans_fft")
      ->required()
      ->check(CLI::IsMember({"rec_pix", "trans_pix", "rec_fft", "trans_fft"}));
  grad_check->add_option("--max-coords", max_coords, "sample this many coordinates on large images")
      ->capture_default_str();
  grad_check->add_option("--seed", seed, "coordinate sampling seed")->capture_default_str();
  add_config_flags(grad_check, rc, false);

  double peak = 1.0;
  auto* metrics = app.add_subcommand("metrics", "print MSE, MAE, PSNR and SSIM for an image pair");
  metrics->add_option("a", in_a, "first image")->required();
  metrics->add_option("b", in_b, "second image")->required();
  metrics->add_option("--peak", peak, "PSNR peak value")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*decompose) return cmd_decompose(in_a, rc);
    if (*spectrum) return cmd_spectrum(in_a, rc);
    if (*mask_energy) return cmd_mask_energy(in_a, rc, save_png);
    if (*loss) return cmd_loss(in_a, in_b, mode, rc);
    if (*batch) return cmd_batch(in_a, in_b, mode, rc);
    if (*grad_check) return cmd_grad_check(in_a, in_b, term, max_coords, seed, rc);
    if (*metrics) return cmd_metrics(in_a, in_b, peak);
  } catch (const Error& e) {
    std::cerr << "freqid: " << e.what() << "\n";
    return e.is_io() ? kExitIo : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "freqid: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
