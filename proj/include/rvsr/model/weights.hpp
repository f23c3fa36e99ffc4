// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rvsr/io/binary.hpp"
#include "rvsr/model/config.hpp"
#include "rvsr/nn/blocks.hpp"
#include "rvsr/random.hpp"
#include "rvsr/ssm/scan.hpp"

namespace rvsr::model {

/// Every block of a network keyed by its path, e.g. "encoder.2.block.5".
using ModelWeights = std::map<std::string, nn::BlockWeights>;

/// Block path -> ordered tensor layout.
using ModelLayout = std::map<std::string, nn::TensorLayout>;

inline std::string encoder_block_path(std::size_t stage, std::size_t block) {
  return "encoder." + std::to_string(stage) + ".block." + std::to_string(block);
}
inline std::string encoder_downsample_path(std::size_t stage) {
  return "encoder." + std::to_string(stage) + ".downsample";
}
inline std::string decoder_path(std::size_t level, const std::string& part) {
  return "decoder." + std::to_string(level) + "." + part;
}

inline ModelLayout model_layout(const NetworkConfig& cfg) {
  cfg.validate();
  ModelLayout layout;
  const std::size_t stages = cfg.stages();
  layout["patch_embed"] = nn::patch_embed_layout(1, cfg.base_dim, cfg.patch);
  for (std::size_t s = 0; s < stages; ++s) {
    for (std::size_t b = 0; b < cfg.depths[s]; ++b) {
      layout[encoder_block_path(s, b)] = nn::vss_block_layout(cfg.stage_dim(s), cfg.ssm_state);
    }
    if (s + 1 < stages) layout[encoder_downsample_path(s)] = nn::downsample_layout(cfg.stage_dim(s));
  }
  for (std::size_t level = 0; level + 1 < stages; ++level) {
    const std::size_t dim = cfg.stage_dim(level);
    layout[decoder_path(level, "upsample")] = nn::upsample_layout(cfg.stage_dim(level + 1), dim, 2, 2);
    layout[decoder_path(level, "fuse")] = {{"bias", {dim}}, {"weight", {dim, 2 * dim}}};
    for (std::size_t b = 0; b < cfg.decoder_depth; ++b) {
      layout[decoder_path(level, "block." + std::to_string(b))] = nn::vss_block_layout(dim, cfg.ssm_state);
    }
  }
  layout["head.expand"] =
      nn::upsample_layout(cfg.base_dim, cfg.base_dim, cfg.head_factor_v(), cfg.head_factor_h());
  layout["head.out"] = {{"bias", {1}}, {"weight", {1, cfg.base_dim}}};
  return layout;
}

/// Deterministic weight initializer.
///
/// Linear and convolution weights are U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
/// biases and norm offsets 0, norm scales 1. Scan parameters: a[., n] =
/// -(n + 1), d = 1, and dt.bias = softplus^-1(dt) with dt log-uniform on
/// [0.01, 0.1].
class WeightInitializer {
 public:
  explicit WeightInitializer(std::uint64_t seed) : rng_(seed) {}

  Tensor make(const std::string& name, const Shape& shape) {
    Tensor t(shape);
    const auto ends_with = [&](const std::string& suffix) {
      return name.size() >= suffix.size() && name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with("dt.bias")) {
      for (float& v : t.data()) {
        const double dt = std::exp(rng_.uniform(std::log(0.01), std::log(0.1)));
        v = static_cast<float>(ssm::inverse_softplus(dt));
      }
    } else if (ends_with(".a")) {
      for (std::size_t c = 0; c < shape[0]; ++c)
        for (std::size_t n = 0; n < shape[1]; ++n) t(c, n) = -static_cast<float>(n + 1);
    } else if (ends_with(".d") || ends_with("scale")) {
      t.fill(1.0f);
    } else if (ends_with("weight")) {
      std::size_t fan_in = 1;
      for (std::size_t i = 1; i < shape.size(); ++i) fan_in *= shape[i];
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (float& v : t.data()) v = static_cast<float>(rng_.uniform(-bound, bound));
    }
    return t;
  }

 private:
  Rng rng_;
};

/// Builds the full weight set; identical (cfg, seed) gives bit-identical weights.
inline ModelWeights build(const NetworkConfig& cfg, std::uint64_t seed) {
  WeightInitializer init(seed);
  ModelWeights weights;
  for (const auto& [path, tensors] : model_layout(cfg)) {
    nn::BlockWeights block(path);
    for (const auto& [name, shape] : tensors) block.set(name, init.make(name, shape));
    weights.emplace(path, std::move(block));
  }
  return weights;
}

inline std::size_t parameter_count(const ModelWeights& weights) {
  std::size_t n = 0;
  for (const auto& [path, block] : weights) n += block.parameter_count();
  return n;
}

/// Fully qualified "block/tensor" names with shapes in storage order.
inline std::vector<std::pair<std::string, Shape>> flat_layout(const ModelLayout& layout) {
  std::vector<std::pair<std::string, Shape>> flat;
  for (const auto& [path, tensors] : layout) {
    std::map<std::string, Shape> sorted(tensors.begin(), tensors.end());
    for (const auto& [name, shape] : sorted) flat.emplace_back(path + "/" + name, shape);
  }
  return flat;
}

inline std::vector<std::pair<std::string, Shape>> flat_layout(const ModelWeights& weights) {
  std::vector<std::pair<std::string, Shape>> flat;
  for (const auto& [path, block] : weights) {
    for (const auto& [name, t] : block.tensors()) flat.emplace_back(path + "/" + name, t.shape());
  }
  return flat;
}

/// Throws IncompatibleError at the first key or shape where `weights`
/// departs from the layout generated by `cfg`.
inline void check_compatible(const ModelWeights& weights, const NetworkConfig& cfg) {
  const auto expected = flat_layout(model_layout(cfg));
  const auto actual = flat_layout(weights);
  const std::size_t common = std::min(expected.size(), actual.size());
  for (std::size_t i = 0; i < common; ++i) {
    if (expected[i].first != actual[i].first) {
      throw IncompatibleError("weights diverge from config at '" + expected[i].first + "' (found '" +
                                  actual[i].first + "')",
                              expected[i].first);
    }
    if (expected[i].second != actual[i].second) {
      throw IncompatibleError("tensor '" + expected[i].first + "' has shape " + to_string(actual[i].second) +
                                  ", config expects " + to_string(expected[i].second),
                              expected[i].first);
    }
  }
  if (expected.size() > common) {
    throw IncompatibleError("weights are missing '" + expected[common].first + "'", expected[common].first);
  }
  if (actual.size() > common) {
    throw IncompatibleError("weights contain unexpected '" + actual[common].first + "'", actual[common].first);
  }
}

/// Digest over names, shapes and raw float bits.
inline std::uint64_t checksum(const ModelWeights& weights) {
  io::Bytes bytes;
  for (const auto& [path, block] : weights) {
    for (const auto& [name, t] : block.tensors()) {
      const std::string key = path + "/" + name;
      bytes.insert(bytes.end(), key.begin(), key.end());
      for (std::size_t d : t.shape()) io::put_le(bytes, static_cast<std::uint64_t>(d));
      for (float v : t.data()) io::put_f32(bytes, v);
    }
  }
  return io::fnv1a64(bytes);
}

}  // namespace rvsr::model
