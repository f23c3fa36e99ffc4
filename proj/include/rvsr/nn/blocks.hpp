// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rvsr/nn/ops.hpp"
#include "rvsr/ssm/ss2d.hpp"
#include "rvsr/tensor.hpp"

namespace rvsr::nn {

/// Named parameter tensors of one block, ordered by name.
class BlockWeights {
 public:
  BlockWeights() = default;
  explicit BlockWeights(std::string path) : path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

  void set(const std::string& name, Tensor value) { tensors_.insert_or_assign(name, std::move(value)); }

  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }

  const Tensor& get(const std::string& name) const {
    const auto it = tensors_.find(name);
    if (it == tensors_.end()) throw IncompatibleError("block '" + path_ + "' has no tensor '" + name + "'", name);
    return it->second;
  }

  Tensor& get(const std::string& name) {
    const auto it = tensors_.find(name);
    if (it == tensors_.end()) throw IncompatibleError("block '" + path_ + "' has no tensor '" + name + "'", name);
    return it->second;
  }

  const std::map<std::string, Tensor>& tensors() const noexcept { return tensors_; }
  std::map<std::string, Tensor>& tensors() noexcept { return tensors_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : tensors_) n += t.size();
    return n;
  }

  friend bool operator==(const BlockWeights&, const BlockWeights&) = default;

 private:
  std::string path_;
  std::map<std::string, Tensor> tensors_;
};

using TensorLayout = std::vector<std::pair<std::string, Shape>>;

/// Counts calls into the scanning core during a forward pass.
struct ForwardProbe {
  std::size_t ss2d_calls = 0;
};

inline constexpr std::size_t kFfnExpansion = 2;

// ---------------------------------------------------------------------------
// Patch embedding: anisotropic (P1, P2) convolution with matching stride,
// followed by channel layer norm.

struct PatchSize {
  std::size_t v = 1;
  std::size_t h = 4;
  friend bool operator==(const PatchSize&, const PatchSize&) = default;
};

inline TensorLayout patch_embed_layout(std::size_t in_channels, std::size_t dim, PatchSize patch) {
  return {{"conv.bias", {dim}},
          {"conv.weight", {dim, in_channels, patch.v, patch.h}},
          {"norm.offset", {dim}},
          {"norm.scale", {dim}}};
}

inline Tensor patch_embed(const Tensor& img, PatchSize patch, const BlockWeights& w) {
  require_rank(img, 3, "patch_embed input");
  if (patch.v == 0 || patch.h == 0 || img.dim(1) % patch.v != 0 || img.dim(2) % patch.h != 0) {
    throw ConfigError("patch_embed: image " + std::to_string(img.dim(1)) + "x" + std::to_string(img.dim(2)) +
                      " not divisible by patch " + std::to_string(patch.v) + "x" + std::to_string(patch.h));
  }
  const Tensor e = conv2d(img, w.get("conv.weight"), &w.get("conv.bias"), {patch.v, patch.h});
  return layer_norm(e, w.get("norm.scale"), w.get("norm.offset"));
}

// ---------------------------------------------------------------------------
// VSS block: m = out(SS2D(LN(x))) + x;  y = FFN(LN(m)) + m.
// FFN = pointwise expand -> depthwise 3x3 -> SiLU -> pointwise project.

inline std::string ss2d_prefix(std::size_t branch) { return "ss2d." + std::to_string(branch) + "."; }

inline TensorLayout vss_block_layout(std::size_t dim, std::size_t state) {
  const std::size_t hidden = kFfnExpansion * dim;
  TensorLayout layout = {
      {"ffn.dw.bias", {hidden}},          {"ffn.dw.weight", {hidden, 1, 3, 3}},
      {"ffn.fc1.bias", {hidden}},         {"ffn.fc1.weight", {hidden, dim}},
      {"ffn.fc2.bias", {dim}},            {"ffn.fc2.weight", {dim, hidden}},
      {"norm1.offset", {dim}},            {"norm1.scale", {dim}},
      {"norm2.offset", {dim}},            {"norm2.scale", {dim}},
      {"out.bias", {dim}},                {"out.weight", {dim, dim}},
  };
  for (std::size_t k = 0; k < ssm::kScanDirections.size(); ++k) {
    const std::string p = ss2d_prefix(k);
    layout.insert(layout.end(), {{p + "a", {dim, state}},
                                 {p + "b.bias", {state}},
                                 {p + "b.weight", {state, dim}},
                                 {p + "c.bias", {state}},
                                 {p + "c.weight", {state, dim}},
                                 {p + "d", {dim}},
                                 {p + "dt.bias", {dim}},
                                 {p + "dt.weight", {dim, dim}}});
  }
  return layout;
}

inline ssm::SelectiveProjections<float> selective_projections(const BlockWeights& w, std::size_t branch) {
  const std::string p = ss2d_prefix(branch);
  return {w.get(p + "a"),        w.get(p + "d"),        w.get(p + "dt.weight"), w.get(p + "dt.bias"),
          w.get(p + "b.weight"), w.get(p + "b.bias"),   w.get(p + "c.weight"),  w.get(p + "c.bias"),
          ssm::InputRule::kEuler};
}

inline Tensor ffn(const Tensor& x, const BlockWeights& w) {
  Tensor hidden = pointwise(x, w.get("ffn.fc1.weight"), &w.get("ffn.fc1.bias"));
  hidden = conv2d(hidden, w.get("ffn.dw.weight"), &w.get("ffn.dw.bias"), {1, 1}, {1, 1}, hidden.dim(0));
  silu_inplace(hidden);
  return pointwise(hidden, w.get("ffn.fc2.weight"), &w.get("ffn.fc2.bias"));
}

inline Tensor vss_block(const Tensor& x, const BlockWeights& w, ForwardProbe* probe = nullptr) {
  require_rank(x, 3, "vss_block input");
  const std::array<ssm::SelectiveProjections<float>, 4> branches{
      selective_projections(w, 0), selective_projections(w, 1), selective_projections(w, 2),
      selective_projections(w, 3)};

  const Tensor normed = layer_norm(x, w.get("norm1.scale"), w.get("norm1.offset"));
  if (probe) ++probe->ss2d_calls;
  const Tensor scanned = ssm::ss2d(normed, std::span<const ssm::SelectiveProjections<float>, 4>(branches));
  Tensor mid = pointwise(scanned, w.get("out.weight"), &w.get("out.bias"));
  add_inplace(mid, x);

  Tensor y = ffn(layer_norm(mid, w.get("norm2.scale"), w.get("norm2.offset")), w);
  add_inplace(y, mid);
  return y;
}

// ---------------------------------------------------------------------------
// Downsampling: 2x2 stride-2 convolution, channels doubled.

inline TensorLayout downsample_layout(std::size_t dim) {
  return {{"conv.bias", {2 * dim}}, {"conv.weight", {2 * dim, dim, 2, 2}}};
}

inline Tensor downsample(const Tensor& x, const BlockWeights& w) {
  require_rank(x, 3, "downsample input");
  if (x.dim(1) % 2 != 0 || x.dim(2) % 2 != 0) {
    throw ConfigError("downsample: odd spatial dims " + std::to_string(x.dim(1)) + "x" + std::to_string(x.dim(2)));
  }
  return conv2d(x, w.get("conv.weight"), &w.get("conv.bias"), {2, 2});
}

// ---------------------------------------------------------------------------
// Sub-pixel upsampling: pointwise expansion to out_dim * gv * gh channels,
// then pixel_shuffle(gv, gh).

inline TensorLayout upsample_layout(std::size_t in_dim, std::size_t out_dim, std::size_t gv, std::size_t gh) {
  return {{"expand.bias", {out_dim * gv * gh}}, {"expand.weight", {out_dim * gv * gh, in_dim}}};
}

inline Tensor upsample(const Tensor& x, const BlockWeights& w, std::size_t gv, std::size_t gh) {
  return pixel_shuffle(pointwise(x, w.get("expand.weight"), &w.get("expand.bias")), gv, gh);
}

}  // namespace rvsr::nn
