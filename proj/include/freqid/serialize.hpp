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

// JSON views of the report types, and a writer that prints every double
// with 17 significant digits.

#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "freqid/gradients.hpp"
#include "freqid/losses.hpp"
#include "freqid/metrics.hpp"

namespace freqid {

inline nlohmann::json config_json(const LossConfig& cfg, const LossWeights& w, double radius) {
  return {
      {"k", cfg.kernel.size()},
      {"sigma", cfg.kernel.sigma()},
      {"epsilon", cfg.epsilon},
      {"mode", to_string(cfg.spectrum_mode)},
      {"radius", radius},
      {"lambdas", {w.rec_pix, w.trans_pix, w.rec_fft, w.trans_fft}},
  };
}

/// `radius` is the mask radius actually used for the evaluated image size.
inline nlohmann::json to_json(const LossReport& r, const LossConfig& cfg, const LossWeights& w,
                              double radius) {
  return {
      {"rec_pix", r.rec_pix},   {"trans_pix", r.trans_pix}, {"rec_fft", r.rec_fft},
      {"trans_fft", r.trans_fft}, {"org", r.org},           {"total", r.total},
      {"config", config_json(cfg, w, radius)},
  };
}

inline nlohmann::json to_json(const MetricsReport& m, double peak = 1.0,
                              const SsimParams& p = {}) {
  nlohmann::json j = {
      {"mse", m.mse},
      {"mae", m.mae},
      {"ssim", m.ssim},
      {"identical", m.mse == 0.0},
      {"peak", peak},
      {"ssim_params",
       {{"window", p.window}, {"sigma", p.sigma}, {"k1", p.k1}, {"k2", p.k2}, {"L", p.dynamic_range}}},
  };
  // +inf PSNR is written as null.
  j["psnr"] = std::isinf(m.psnr) ? nlohmann::json(nullptr) : nlohmann::json(m.psnr);
  return j;
}

inline nlohmann::json to_json(const FdReport& r) {
  return {
      {"max_rel_err", r.max_rel_err},
      {"max_abs_err", r.max_abs_err},
      {"checked_coords", r.checked_coords},
      {"skipped_coords", r.skipped_coords},
  };
}

namespace detail {

inline void dump_value(const nlohmann::json& j, int indent, int depth, std::string& out) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent) * d, ' ');
  };
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += nlohmann::json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        dump_value(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        newline(depth + 1);
        dump_value(j[i], indent, depth + 1, out);
      }
      newline(depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Like json::dump, but doubles keep 17 significant digits.
inline std::string dump_json(const nlohmann::json& j, int indent = 2) {
  std::string out;
  detail::dump_value(j, indent, 0, out);
  return out;
}

}  // namespace freqid
