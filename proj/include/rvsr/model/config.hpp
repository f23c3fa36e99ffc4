// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvsr/error.hpp"
#include "rvsr/nn/blocks.hpp"

namespace rvsr::model {

/// Shape of the encoder-decoder network.
///
/// Encoder stage i runs depths[i] VSS blocks at width base_dim * 2^i; every
/// stage but the last ends with a 2x downsample. Each decoder level upsamples
/// by 2, fuses the matching encoder skip and runs decoder_depth VSS blocks.
/// The head then upsamples by (patch.v * upscale_v, patch.h * upscale_h), so
/// the output is (upscale_v * input_h) x (upscale_h * input_w).
struct NetworkConfig {
  std::vector<std::size_t> depths{2, 2, 2, 2};
  std::size_t base_dim = 16;
  nn::PatchSize patch{1, 4};
  std::size_t upscale_v = 4;
  std::size_t upscale_h = 1;
  std::size_t ssm_state = 8;
  std::size_t input_h = 16;
  std::size_t input_w = 1024;
  std::size_t decoder_depth = 1;

  std::size_t stages() const noexcept { return depths.size(); }
  std::size_t stage_dim(std::size_t stage) const noexcept { return base_dim << stage; }
  std::size_t output_h() const noexcept { return input_h * upscale_v; }
  std::size_t output_w() const noexcept { return input_w * upscale_h; }
  std::size_t head_factor_v() const noexcept { return patch.v * upscale_v; }
  std::size_t head_factor_h() const noexcept { return patch.h * upscale_h; }

  /// Throws ConfigError listing every violated constraint.
  void validate() const {
    std::vector<std::string> problems;
    if (depths.size() < 2) problems.push_back("at least 2 stages required");
    for (std::size_t i = 0; i < depths.size(); ++i) {
      if (depths[i] < 1) problems.push_back("depth of stage " + std::to_string(i) + " must be >= 1");
    }
    if (base_dim < 1) problems.push_back("base_dim must be >= 1");
    if (ssm_state < 1) problems.push_back("ssm_state must be >= 1");
    if (decoder_depth < 1) problems.push_back("decoder_depth must be >= 1");
    if (patch.v < 1 || patch.h < 1) problems.push_back("patch sizes must be >= 1");
    if (upscale_v < 1 || upscale_h < 1) problems.push_back("upscale factors must be >= 1");
    if (!depths.empty() && patch.v >= 1 && patch.h >= 1) {
      const std::size_t reduction = std::size_t{1} << (depths.size() - 1);
      const std::size_t div_h = patch.v * reduction;
      const std::size_t div_w = patch.h * reduction;
      if (input_h == 0 || input_h % div_h != 0) {
        problems.push_back("input height " + std::to_string(input_h) + " not divisible by patch_v*2^(stages-1) = " +
                           std::to_string(div_h));
      }
      if (input_w == 0 || input_w % div_w != 0) {
        problems.push_back("input width " + std::to_string(input_w) + " not divisible by patch_h*2^(stages-1) = " +
                           std::to_string(div_w));
      }
    }
    if (!problems.empty()) {
      std::string msg = "invalid network config:";
      for (const auto& p : problems) msg += "\n  - " + p;
      throw ConfigError(msg);
    }
  }

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Depth variants, shallowest to deepest.
inline NetworkConfig tiny_config() { return {}; }
inline NetworkConfig small_config() {
  NetworkConfig c;
  c.depths = {2, 2, 9, 2};
  return c;
}
inline NetworkConfig medium_config() {
  NetworkConfig c;
  c.depths = {2, 2, 12, 2};
  return c;
}
inline NetworkConfig large_config() {
  NetworkConfig c;
  c.depths = {2, 2, 27, 2};
  return c;
}

inline nlohmann::json config_to_json(const NetworkConfig& c) {
  return {{"depths", c.depths},
          {"base_dim", c.base_dim},
          {"patch", {c.patch.v, c.patch.h}},
          {"upscale", {c.upscale_v, c.upscale_h}},
          {"ssm_state", c.ssm_state},
          {"input", {c.input_h, c.input_w}},
          {"decoder_depth", c.decoder_depth}};
}

inline NetworkConfig config_from_json(const nlohmann::json& j) {
  NetworkConfig c;
  try {
    c.depths = j.at("depths").get<std::vector<std::size_t>>();
    c.base_dim = j.at("base_dim").get<std::size_t>();
    c.patch = {j.at("patch").at(0).get<std::size_t>(), j.at("patch").at(1).get<std::size_t>()};
    c.upscale_v = j.at("upscale").at(0).get<std::size_t>();
    c.upscale_h = j.at("upscale").at(1).get<std::size_t>();
    c.ssm_state = j.at("ssm_state").get<std::size_t>();
    c.input_h = j.at("input").at(0).get<std::size_t>();
    c.input_w = j.at("input").at(1).get<std::size_t>();
    c.decoder_depth = j.at("decoder_depth").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw IncompatibleError(std::string("network config in weight manifest is malformed: ") + e.what(), "config");
  }
  return c;
}

}  // namespace rvsr::model
