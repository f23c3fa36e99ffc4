// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>

#include "rvsr/tensor.hpp"

namespace rvsr::ssm {

/// Continuous diagonal state-space parameters for D channels of state size N.
///
///   h'(t) = a h(t) + b x(t),   y(t) = <c, h(t)> + d x(t)
///
/// a, b, c are (D, N); d and delta are (D). a must be negative for stability.
template <std::floating_point T>
struct SsmParams {
  BasicTensor<T> a;
  BasicTensor<T> b;
  BasicTensor<T> c;
  BasicTensor<T> d;
  BasicTensor<T> delta;

  std::size_t channels() const { return a.dim(0); }
  std::size_t state_dim() const { return a.dim(1); }

  void validate() const {
    require_rank(a, 2, "ssm a");
    if (channels() < 1 || state_dim() < 1) throw ConfigError("ssm needs at least one channel and one state");
    require_shape(b, a.shape(), "ssm b");
    require_shape(c, a.shape(), "ssm c");
    require_shape(d, {channels()}, "ssm d");
    require_shape(delta, {channels()}, "ssm delta");
    for (const auto* t : {&a, &b, &c, &d, &delta}) {
      if (!t->all_finite()) throw ConfigError("ssm parameters must be finite");
    }
    for (T v : a.data()) {
      if (!(v < T{0})) throw ConfigError("ssm state coefficients must be negative");
    }
    for (T v : delta.data()) {
      if (!(v > T{0})) throw ConfigError("ssm time scales must be positive");
    }
  }
};

/// Discrete recurrence h_t = a_bar * h_{t-1} + b_bar * x_t, y_t = <c, h_t> + d x_t.
template <std::floating_point T>
struct DiscreteSsm {
  BasicTensor<T> a_bar;  // (D, N)
  BasicTensor<T> b_bar;  // (D, N)
  BasicTensor<T> c;      // (D, N)
  BasicTensor<T> d;      // (D)

  std::size_t channels() const { return a_bar.dim(0); }
  std::size_t state_dim() const { return a_bar.dim(1); }
};

/// How the input matrix is discretized.
enum class InputRule {
  kZeroOrderHold,  // b_bar = (exp(delta a) - 1) / a * b
  kEuler,          // b_bar = delta * b
};

struct DiscretizeOptions {
  InputRule rule = InputRule::kZeroOrderHold;
  /// Below this |a| the ZOH input gain uses its a -> 0 limit delta * b.
  /// Zero disables the limit (used only for fault injection).
  double taylor_threshold = 1e-8;
};

/// ZOH input gain per unit b: (exp(delta a) - 1) / a, or delta near a = 0.
inline double zoh_input_gain(double a, double delta, double taylor_threshold = 1e-8) noexcept {
  if (std::abs(a) < taylor_threshold) return delta;
  return std::expm1(delta * a) / a;
}

/// Elementwise discretization of a diagonal SSM.
template <std::floating_point T>
DiscreteSsm<T> zoh_discretize(const SsmParams<T>& p, const DiscretizeOptions& opts = {}) {
  require_rank(p.a, 2, "ssm a");
  const std::size_t channels = p.a.dim(0);
  const std::size_t states = p.a.dim(1);
  DiscreteSsm<T> out{BasicTensor<T>(p.a.shape()), BasicTensor<T>(p.a.shape()), p.c, p.d};
  for (std::size_t ch = 0; ch < channels; ++ch) {
    const double dt = p.delta(ch);
    for (std::size_t n = 0; n < states; ++n) {
      const double a = p.a(ch, n);
      const double b = p.b(ch, n);
      out.a_bar(ch, n) = static_cast<T>(std::exp(dt * a));
      const double gain = opts.rule == InputRule::kEuler ? dt : zoh_input_gain(a, dt, opts.taylor_threshold);
      out.b_bar(ch, n) = static_cast<T>(gain * b);
    }
  }
  return out;
}

}  // namespace rvsr::ssm
