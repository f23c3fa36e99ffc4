// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rvsr/geometry/projection.hpp"
#include "rvsr/model/config.hpp"
#include "rvsr/model/weights.hpp"
#include "rvsr/nn/blocks.hpp"

namespace rvsr::model {

/// Calibration of an image upsampled by (sv, sh).
///
/// Output beam j sits at fractional source row j / sv; angles and offsets are
/// interpolated linearly between source beams and extrapolated along the last
/// gap for the rows below the bottom source beam.
inline geometry::BeamCalibration upsample_calibration(const geometry::BeamCalibration& src, std::size_t sv,
                                                      std::size_t sh) {
  src.validate();
  geometry::BeamCalibration out;
  out.r_max = src.r_max;
  out.width = src.width * sh;
  const std::size_t h = src.height();
  const std::size_t rows = h * sv;
  out.phi.resize(rows);
  out.delta.resize(rows);
  for (std::size_t j = 0; j < rows; ++j) {
    const std::size_t base = std::min(j / sv, h - 2);
    const double frac = static_cast<double>(j) / static_cast<double>(sv) - static_cast<double>(base);
    out.phi[j] = src.phi[base] + frac * (src.phi[base + 1] - src.phi[base]);
    out.delta[j] = src.delta[base] + frac * (src.delta[base + 1] - src.delta[base]);
  }
  return out;
}

/// Smallest range the network head may emit: one 16-bit quantization step of r_max.
inline double min_output_range(double r_max) noexcept { return r_max / 65535.0; }

namespace detail {

inline void require_finite(const Tensor& t, const std::string& path) {
  if (!t.all_finite()) throw NumericalError("non-finite activation after block '" + path + "'", path);
}

inline const nn::BlockWeights& block(const ModelWeights& w, const std::string& path) {
  const auto it = w.find(path);
  if (it == w.end()) throw IncompatibleError("weights have no block '" + path + "'", path);
  return it->second;
}

}  // namespace detail

/// Runs the network on a normalized (1, H, W) tensor and returns the
/// (1, upscale_v * H, upscale_h * W) prediction before denormalization.
inline Tensor forward_tensor(const Tensor& input, const ModelWeights& weights, const NetworkConfig& cfg,
                             nn::ForwardProbe* probe = nullptr) {
  cfg.validate();
  check_compatible(weights, cfg);
  require_shape(input, {1, cfg.input_h, cfg.input_w}, "network input");

  Tensor x = nn::patch_embed(input, cfg.patch, detail::block(weights, "patch_embed"));
  detail::require_finite(x, "patch_embed");

  std::vector<Tensor> skips;
  for (std::size_t s = 0; s < cfg.stages(); ++s) {
    for (std::size_t b = 0; b < cfg.depths[s]; ++b) {
      const std::string path = encoder_block_path(s, b);
      x = nn::vss_block(x, detail::block(weights, path), probe);
      detail::require_finite(x, path);
    }
    if (s + 1 < cfg.stages()) {
      skips.push_back(x);
      const std::string path = encoder_downsample_path(s);
      x = nn::downsample(x, detail::block(weights, path));
      detail::require_finite(x, path);
    }
  }

  for (std::size_t level = cfg.stages() - 1; level-- > 0;) {
    const std::string up_path = decoder_path(level, "upsample");
    Tensor up = nn::upsample(x, detail::block(weights, up_path), 2, 2);
    const Tensor& skip = skips[level];
    if (up.dim(1) != skip.dim(1) || up.dim(2) != skip.dim(2)) {
      throw ConfigError("decoder level " + std::to_string(level) + ": upsampled " + to_string(up.shape()) +
                        " does not match skip " + to_string(skip.shape()));
    }
    const nn::BlockWeights& fuse = detail::block(weights, decoder_path(level, "fuse"));
    x = nn::pointwise(nn::concat_channels(up, skip), fuse.get("weight"), &fuse.get("bias"));
    detail::require_finite(x, decoder_path(level, "fuse"));
    for (std::size_t b = 0; b < cfg.decoder_depth; ++b) {
      const std::string path = decoder_path(level, "block." + std::to_string(b));
      x = nn::vss_block(x, detail::block(weights, path), probe);
      detail::require_finite(x, path);
    }
  }

  x = nn::upsample(x, detail::block(weights, "head.expand"), cfg.head_factor_v(), cfg.head_factor_h());
  detail::require_finite(x, "head.expand");
  const nn::BlockWeights& out = detail::block(weights, "head.out");
  x = nn::pointwise(x, out.get("weight"), &out.get("bias"));
  detail::require_finite(x, "head.out");
  return x;
}

/// End-to-end super-resolution of a range image.
///
/// Ranges are divided by r_max (holes enter as 0), passed through the
/// network, scaled back and clamped to [r_max / 65535, r_max]. The result
/// carries upsample_calibration(img.calibration(), upscale_v, upscale_h).
inline geometry::RangeImage forward(const geometry::RangeImage& img, const ModelWeights& weights,
                                    const NetworkConfig& cfg, nn::ForwardProbe* probe = nullptr) {
  if (img.height() != cfg.input_h || img.width() != cfg.input_w) {
    throw ConfigError("range image is " + std::to_string(img.height()) + "x" + std::to_string(img.width()) +
                      " but the network expects " + std::to_string(cfg.input_h) + "x" + std::to_string(cfg.input_w));
  }
  const double r_max = img.calibration().r_max;
  Tensor input({1, cfg.input_h, cfg.input_w});
  for (std::size_t i = 0; i < input.size(); ++i) {
    const float v = img.values()[i];
    input[i] = std::isnan(v) ? 0.0f : static_cast<float>(v / r_max);
  }

  const Tensor pred = forward_tensor(input, weights, cfg, probe);

  geometry::RangeImage out(upsample_calibration(img.calibration(), cfg.upscale_v, cfg.upscale_h));
  const double floor = min_output_range(r_max);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = std::clamp(static_cast<double>(pred[i]) * r_max, floor, r_max);
    out.values()[i] = geometry::stored_range(r, r_max);
  }
  return out;
}

}  // namespace rvsr::model
