// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <vector>

#include "rvsr/ssm/discretize.hpp"
#include "rvsr/tensor.hpp"

namespace rvsr::ssm {

/// Runs the discrete recurrence over x of shape (D, L), h_0 = 0.
template <std::floating_point T>
BasicTensor<T> scan_1d(const DiscreteSsm<T>& ssm, const BasicTensor<T>& x) {
  require_rank(x, 2, "scan_1d input");
  const std::size_t channels = ssm.channels();
  const std::size_t states = ssm.state_dim();
  if (x.dim(0) != channels) {
    throw InputError("scan_1d: input has " + std::to_string(x.dim(0)) + " channels, ssm has " +
                     std::to_string(channels));
  }
  require_shape(ssm.b_bar, ssm.a_bar.shape(), "scan_1d b_bar");
  require_shape(ssm.c, ssm.a_bar.shape(), "scan_1d c");
  require_shape(ssm.d, {channels}, "scan_1d d");

  const std::size_t length = x.dim(1);
  BasicTensor<T> y(x.shape());
  std::vector<double> h(states);
  for (std::size_t ch = 0; ch < channels; ++ch) {
    std::fill(h.begin(), h.end(), 0.0);
    const double skip = ssm.d(ch);
    for (std::size_t t = 0; t < length; ++t) {
      const double xt = x(ch, t);
      double acc = skip * xt;
      for (std::size_t n = 0; n < states; ++n) {
        h[n] = static_cast<double>(ssm.a_bar(ch, n)) * h[n] + static_cast<double>(ssm.b_bar(ch, n)) * xt;
        acc += static_cast<double>(ssm.c(ch, n)) * h[n];
      }
      y(ch, t) = static_cast<T>(acc);
    }
  }
  return y;
}

inline double softplus(double v) noexcept {
  // log1p(exp(v)) without overflow for large v.
  return v > 20.0 ? v : std::log1p(std::exp(v));
}

/// Inverse of softplus on (0, inf).
inline double inverse_softplus(double y) noexcept { return y > 20.0 ? y : std::log(std::expm1(y)); }

/// Input-dependent projections of a selective scan over D channels, N states.
///
/// At step t, with x_t the D-vector of channel inputs:
///   delta_t = softplus(dt_weight x_t + dt_bias)   (D)
///   B_t     = b_weight x_t + b_bias               (N, shared by channels)
///   C_t     = c_weight x_t + c_bias               (N, shared by channels)
template <std::floating_point T>
struct SelectiveProjections {
  BasicTensor<T> a;          // (D, N), negative
  BasicTensor<T> d;          // (D)
  BasicTensor<T> dt_weight;  // (D, D)
  BasicTensor<T> dt_bias;    // (D)
  BasicTensor<T> b_weight;   // (N, D)
  BasicTensor<T> b_bias;     // (N)
  BasicTensor<T> c_weight;   // (N, D)
  BasicTensor<T> c_bias;     // (N)
  InputRule rule = InputRule::kEuler;

  std::size_t channels() const { return a.dim(0); }
  std::size_t state_dim() const { return a.dim(1); }

  void validate() const {
    require_rank(a, 2, "selective a");
    const std::size_t dm = channels();
    const std::size_t n = state_dim();
    require_shape(d, {dm}, "selective d");
    require_shape(dt_weight, {dm, dm}, "selective dt_weight");
    require_shape(dt_bias, {dm}, "selective dt_bias");
    require_shape(b_weight, {n, dm}, "selective b_weight");
    require_shape(b_bias, {n}, "selective b_bias");
    require_shape(c_weight, {n, dm}, "selective c_weight");
    require_shape(c_bias, {n}, "selective c_bias");
  }
};

/// Selective scan over x of shape (D, L): per-step discretization with
/// a_bar_t = exp(delta_t a) and b_bar_t from `proj.rule` applied to B_t.
template <std::floating_point T>
BasicTensor<T> selective_scan_1d(const BasicTensor<T>& x, const SelectiveProjections<T>& proj) {
  require_rank(x, 2, "selective_scan_1d input");
  proj.validate();
  const std::size_t channels = proj.channels();
  const std::size_t states = proj.state_dim();
  if (x.dim(0) != channels) {
    throw InputError("selective_scan_1d: input has " + std::to_string(x.dim(0)) + " channels, projections expect " +
                     std::to_string(channels));
  }
  const std::size_t length = x.dim(1);

  BasicTensor<T> y(x.shape());
  std::vector<double> h(channels * states, 0.0);
  std::vector<double> xt(channels), dt(channels), bt(states), ct(states);

  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t ch = 0; ch < channels; ++ch) xt[ch] = x(ch, t);
    for (std::size_t o = 0; o < channels; ++o) {
      double acc = proj.dt_bias(o);
      for (std::size_t i = 0; i < channels; ++i) acc += static_cast<double>(proj.dt_weight(o, i)) * xt[i];
      dt[o] = softplus(acc);
    }
    for (std::size_t n = 0; n < states; ++n) {
      double accb = proj.b_bias(n);
      double accc = proj.c_bias(n);
      for (std::size_t i = 0; i < channels; ++i) {
        accb += static_cast<double>(proj.b_weight(n, i)) * xt[i];
        accc += static_cast<double>(proj.c_weight(n, i)) * xt[i];
      }
      bt[n] = accb;
      ct[n] = accc;
    }
    for (std::size_t ch = 0; ch < channels; ++ch) {
      double* hs = h.data() + ch * states;
      double acc = static_cast<double>(proj.d(ch)) * xt[ch];
      for (std::size_t n = 0; n < states; ++n) {
        const double a = proj.a(ch, n);
        const double gain = proj.rule == InputRule::kEuler ? dt[ch] : zoh_input_gain(a, dt[ch]);
        hs[n] = std::exp(dt[ch] * a) * hs[n] + gain * bt[n] * xt[ch];
        acc += ct[n] * hs[n];
      }
      y(ch, t) = static_cast<T>(acc);
    }
  }
  return y;
}

}  // namespace rvsr::ssm
