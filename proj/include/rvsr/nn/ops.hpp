// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "rvsr/error.hpp"
#include "rvsr/tensor.hpp"

namespace rvsr::nn {

struct Stride2d {
  std::size_t v = 1;
  std::size_t h = 1;
};

struct Padding2d {
  std::size_t v = 0;
  std::size_t h = 0;
};

/// Cross-correlation of x (Cin, H, W) with weight (Cout, Cin / groups, kh, kw)
/// and optional bias (Cout), zero padding. Output spatial extent is
/// floor((in + 2p - k) / stride) + 1. groups == Cin == Cout gives a depthwise
/// convolution.
template <typename T>
BasicTensor<T> conv2d(const BasicTensor<T>& x, const BasicTensor<T>& weight,
                      const std::type_identity_t<BasicTensor<T>>* bias, Stride2d stride = {}, Padding2d pad = {}, std::size_t groups = 1) {
  require_rank(x, 3, "conv2d input");
  require_rank(weight, 4, "conv2d weight");
  const std::size_t cin = x.dim(0), in_h = x.dim(1), in_w = x.dim(2);
  const std::size_t cout = weight.dim(0), kh = weight.dim(2), kw = weight.dim(3);
  if (groups == 0 || cin % groups != 0 || cout % groups != 0 || weight.dim(1) != cin / groups) {
    throw InputError("conv2d: weight " + to_string(weight.shape()) + " incompatible with input " +
                     to_string(x.shape()) + " and " + std::to_string(groups) + " groups");
  }
  if (stride.v == 0 || stride.h == 0) throw InputError("conv2d: stride must be positive");
  if (in_h + 2 * pad.v < kh || in_w + 2 * pad.h < kw) throw InputError("conv2d: kernel larger than padded input");
  if (bias) require_shape(*bias, {cout}, "conv2d bias");

  const std::size_t out_h = (in_h + 2 * pad.v - kh) / stride.v + 1;
  const std::size_t out_w = (in_w + 2 * pad.h - kw) / stride.h + 1;
  const std::size_t cin_g = cin / groups;
  const std::size_t cout_g = cout / groups;

  BasicTensor<T> y({cout, out_h, out_w});
  std::vector<double> acc(out_h * out_w);
  for (std::size_t oc = 0; oc < cout; ++oc) {
    const std::size_t g = oc / cout_g;
    std::fill(acc.begin(), acc.end(), bias ? static_cast<double>((*bias)(oc)) : 0.0);
    for (std::size_t ic = 0; ic < cin_g; ++ic) {
      const auto plane = x.slice(g * cin_g + ic);
      for (std::size_t ky = 0; ky < kh; ++ky) {
        for (std::size_t kx = 0; kx < kw; ++kx) {
          const double wv = weight(oc, ic, ky, kx);
          for (std::size_t oy = 0; oy < out_h; ++oy) {
            const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * stride.v + ky) - static_cast<std::ptrdiff_t>(pad.v);
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in_h)) continue;
            const T* row = plane.data() + static_cast<std::size_t>(iy) * in_w;
            double* out_row = acc.data() + oy * out_w;
            for (std::size_t ox = 0; ox < out_w; ++ox) {
              const std::ptrdiff_t ix =
                  static_cast<std::ptrdiff_t>(ox * stride.h + kx) - static_cast<std::ptrdiff_t>(pad.h);
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in_w)) continue;
              out_row[ox] += wv * static_cast<double>(row[ix]);
            }
          }
        }
      }
    }
    auto dst = y.slice(oc);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<T>(acc[i]);
  }
  return y;
}

/// Per-location linear map over channels: weight (Cout, Cin), bias (Cout).
/// Equivalent to a 1x1 convolution.
template <typename T>
BasicTensor<T> pointwise(const BasicTensor<T>& x, const BasicTensor<T>& weight,
                         const std::type_identity_t<BasicTensor<T>>* bias) {
  require_rank(x, 3, "pointwise input");
  require_rank(weight, 2, "pointwise weight");
  const std::size_t cin = x.dim(0);
  const std::size_t cout = weight.dim(0);
  if (weight.dim(1) != cin) {
    throw InputError("pointwise: weight " + to_string(weight.shape()) + " incompatible with input " +
                     to_string(x.shape()));
  }
  if (bias) require_shape(*bias, {cout}, "pointwise bias");
  const std::size_t plane = x.dim(1) * x.dim(2);
  BasicTensor<T> y({cout, x.dim(1), x.dim(2)});
  std::vector<double> acc(plane);
  for (std::size_t oc = 0; oc < cout; ++oc) {
    std::fill(acc.begin(), acc.end(), bias ? static_cast<double>((*bias)(oc)) : 0.0);
    for (std::size_t ic = 0; ic < cin; ++ic) {
      const double wv = weight(oc, ic);
      const auto src = x.slice(ic);
      for (std::size_t i = 0; i < plane; ++i) acc[i] += wv * static_cast<double>(src[i]);
    }
    auto dst = y.slice(oc);
    for (std::size_t i = 0; i < plane; ++i) dst[i] = static_cast<T>(acc[i]);
  }
  return y;
}

inline constexpr double kLayerNormEps = 1e-5;

/// Normalizes each spatial location of x (C, H, W) over its C channels to zero
/// mean and unit variance, then applies scale and offset (both (C)).
template <typename T>
BasicTensor<T> layer_norm(const BasicTensor<T>& x, const BasicTensor<T>& scale, const BasicTensor<T>& offset,
                          double eps = kLayerNormEps) {
  require_rank(x, 3, "layer_norm input");
  const std::size_t channels = x.dim(0);
  require_shape(scale, {channels}, "layer_norm scale");
  require_shape(offset, {channels}, "layer_norm offset");
  const std::size_t plane = x.dim(1) * x.dim(2);
  BasicTensor<T> y(x.shape());
  std::vector<double> mean(plane, 0.0), var(plane, 0.0);
  for (std::size_t ch = 0; ch < channels; ++ch) {
    const auto src = x.slice(ch);
    for (std::size_t i = 0; i < plane; ++i) mean[i] += src[i];
  }
  for (double& m : mean) m /= static_cast<double>(channels);
  for (std::size_t ch = 0; ch < channels; ++ch) {
    const auto src = x.slice(ch);
    for (std::size_t i = 0; i < plane; ++i) {
      const double d = src[i] - mean[i];
      var[i] += d * d;
    }
  }
  for (double& v : var) v = 1.0 / std::sqrt(v / static_cast<double>(channels) + eps);
  for (std::size_t ch = 0; ch < channels; ++ch) {
    const auto src = x.slice(ch);
    auto dst = y.slice(ch);
    const double s = scale(ch);
    const double o = offset(ch);
    for (std::size_t i = 0; i < plane; ++i) dst[i] = static_cast<T>((src[i] - mean[i]) * var[i] * s + o);
  }
  return y;
}

inline double silu(double v) noexcept { return v / (1.0 + std::exp(-v)); }

template <typename T>
void silu_inplace(BasicTensor<T>& x) {
  for (T& v : x.data()) v = static_cast<T>(silu(v));
}

template <typename T>
void add_inplace(BasicTensor<T>& acc, const BasicTensor<T>& other) {
  require_shape(other, acc.shape(), "add");
  auto a = acc.data();
  const auto b = other.data();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

/// Channel-to-space reindexing:
///   out[c][i*gv + dv][j*gh + dh] = in[c*gv*gh + dv*gh + dh][i][j]
template <typename T>
BasicTensor<T> pixel_shuffle(const BasicTensor<T>& x, std::size_t gv, std::size_t gh) {
  require_rank(x, 3, "pixel_shuffle input");
  if (gv == 0 || gh == 0 || x.dim(0) % (gv * gh) != 0) {
    throw ConfigError("pixel_shuffle: " + std::to_string(x.dim(0)) + " channels not divisible by " +
                      std::to_string(gv) + "x" + std::to_string(gh));
  }
  const std::size_t c_out = x.dim(0) / (gv * gh);
  const std::size_t h = x.dim(1), w = x.dim(2);
  BasicTensor<T> y({c_out, h * gv, w * gh});
  for (std::size_t c = 0; c < c_out; ++c)
    for (std::size_t dv = 0; dv < gv; ++dv)
      for (std::size_t dh = 0; dh < gh; ++dh) {
        const auto src = x.slice(c * gv * gh + dv * gh + dh);
        for (std::size_t i = 0; i < h; ++i)
          for (std::size_t j = 0; j < w; ++j) y(c, i * gv + dv, j * gh + dh) = src[i * w + j];
      }
  return y;
}

/// Inverse of pixel_shuffle.
template <typename T>
BasicTensor<T> pixel_unshuffle(const BasicTensor<T>& x, std::size_t gv, std::size_t gh) {
  require_rank(x, 3, "pixel_unshuffle input");
  if (gv == 0 || gh == 0 || x.dim(1) % gv != 0 || x.dim(2) % gh != 0) {
    throw ConfigError("pixel_unshuffle: spatial dims not divisible by " + std::to_string(gv) + "x" +
                      std::to_string(gh));
  }
  const std::size_t c_in = x.dim(0);
  const std::size_t h = x.dim(1) / gv, w = x.dim(2) / gh;
  BasicTensor<T> y({c_in * gv * gh, h, w});
  for (std::size_t c = 0; c < c_in; ++c)
    for (std::size_t dv = 0; dv < gv; ++dv)
      for (std::size_t dh = 0; dh < gh; ++dh)
        for (std::size_t i = 0; i < h; ++i)
          for (std::size_t j = 0; j < w; ++j) y(c * gv * gh + dv * gh + dh, i, j) = x(c, i * gv + dv, j * gh + dh);
  return y;
}

/// Stacks a and b along the channel axis.
template <typename T>
BasicTensor<T> concat_channels(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  require_rank(a, 3, "concat input");
  require_rank(b, 3, "concat input");
  if (a.dim(1) != b.dim(1) || a.dim(2) != b.dim(2)) {
    throw InputError("concat: spatial dims differ " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  }
  std::vector<T> data(a.values());
  data.insert(data.end(), b.values().begin(), b.values().end());
  return BasicTensor<T>({a.dim(0) + b.dim(0), a.dim(1), a.dim(2)}, std::move(data));
}

}  // namespace rvsr::nn
