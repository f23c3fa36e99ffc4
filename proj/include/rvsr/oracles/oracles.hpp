// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

// Reference implementations used to check the production code paths. Each one
// is written the slow, obvious way and shares no code with what it checks.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "rvsr/geometry/types.hpp"
#include "rvsr/tensor.hpp"

namespace rvsr::oracles {

/// State after integrating h' = a h + b x over [0, dt] from h0 with constant x,
/// using adaptive Dormand-Prince steps.
inline double integrate_scalar_ssm(double a, double b, double x, double h0, double dt, double tol = 1e-13) {
  namespace odeint = boost::numeric::odeint;
  double h = h0;
  auto rhs = [=](const double& state, double& dhdt, double /*t*/) { dhdt = a * state + b * x; };
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<double>());
  odeint::integrate_adaptive(stepper, rhs, h, 0.0, dt, dt / 64.0);
  return h;
}

/// y_t = sum_{k<=t} K_k x_{t-k} + d x_t with K_k = sum_n c_n a_bar_n^k b_bar_n.
/// Inputs are (D, N) / (D) / (D, L) double tensors.
inline BasicTensor<double> ssm_convolution(const BasicTensor<double>& a_bar, const BasicTensor<double>& b_bar,
                                           const BasicTensor<double>& c, const BasicTensor<double>& d,
                                           const BasicTensor<double>& x) {
  const std::size_t channels = x.dim(0), length = x.dim(1), states = a_bar.dim(1);
  BasicTensor<double> y(x.shape());
  for (std::size_t ch = 0; ch < channels; ++ch) {
    std::vector<double> kernel(length, 0.0);
    for (std::size_t k = 0; k < length; ++k)
      for (std::size_t n = 0; n < states; ++n)
        kernel[k] += c(ch, n) * std::pow(a_bar(ch, n), static_cast<double>(k)) * b_bar(ch, n);
    for (std::size_t t = 0; t < length; ++t) {
      double acc = d(ch) * x(ch, t);
      for (std::size_t k = 0; k <= t; ++k) acc += kernel[k] * x(ch, t - k);
      y(ch, t) = acc;
    }
  }
  return y;
}

/// Row-major grid indices in the order each direction visits them, written out
/// as plain nested loops. Index 0..3 follows RowMajorForward, RowMajorReverse,
/// ColMajorForward, ColMajorReverse.
inline std::vector<std::size_t> enumerate_traversal(int direction, std::size_t rows, std::size_t cols) {
  std::vector<std::size_t> seq;
  switch (direction) {
    case 0:
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) seq.push_back(r * cols + c);
      break;
    case 1:
      for (std::size_t r = rows; r-- > 0;)
        for (std::size_t c = cols; c-- > 0;) seq.push_back(r * cols + c);
      break;
    case 2:
      for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r) seq.push_back(r * cols + c);
      break;
    default:
      for (std::size_t c = cols; c-- > 0;)
        for (std::size_t r = rows; r-- > 0;) seq.push_back(r * cols + c);
      break;
  }
  return seq;
}

/// Direct seven-loop convolution (Cin, H, W) * (Cout, Cin, kh, kw), no groups.
inline BasicTensor<double> naive_conv2d(const BasicTensor<double>& x, const BasicTensor<double>& w,
                                        const BasicTensor<double>* bias, std::size_t sv, std::size_t sh,
                                        std::size_t pv, std::size_t ph) {
  const std::size_t cin = x.dim(0), h = x.dim(1), wd = x.dim(2);
  const std::size_t cout = w.dim(0), kh = w.dim(2), kw = w.dim(3);
  const std::size_t oh = (h + 2 * pv - kh) / sv + 1, ow = (wd + 2 * ph - kw) / sh + 1;
  BasicTensor<double> y({cout, oh, ow});
  for (std::size_t o = 0; o < cout; ++o)
    for (std::size_t i = 0; i < oh; ++i)
      for (std::size_t j = 0; j < ow; ++j) {
        double acc = bias ? (*bias)(o) : 0.0;
        for (std::size_t c = 0; c < cin; ++c)
          for (std::size_t u = 0; u < kh; ++u)
            for (std::size_t v = 0; v < kw; ++v) {
              const long r = static_cast<long>(i * sv + u) - static_cast<long>(pv);
              const long q = static_cast<long>(j * sh + v) - static_cast<long>(ph);
              if (r < 0 || q < 0 || r >= static_cast<long>(h) || q >= static_cast<long>(wd)) continue;
              acc += w(o, c, u, v) * x(c, static_cast<std::size_t>(r), static_cast<std::size_t>(q));
            }
        y(o, i, j) = acc;
      }
  return y;
}

/// Two-pass channel statistics per location, then affine.
inline BasicTensor<double> naive_layer_norm(const BasicTensor<double>& x, const BasicTensor<double>& scale,
                                            const BasicTensor<double>& offset, double eps = 1e-5) {
  BasicTensor<double> y(x.shape());
  const std::size_t ch = x.dim(0);
  for (std::size_t i = 0; i < x.dim(1); ++i)
    for (std::size_t j = 0; j < x.dim(2); ++j) {
      double mean = 0.0;
      for (std::size_t c = 0; c < ch; ++c) mean += x(c, i, j);
      mean /= static_cast<double>(ch);
      double var = 0.0;
      for (std::size_t c = 0; c < ch; ++c) var += (x(c, i, j) - mean) * (x(c, i, j) - mean);
      var /= static_cast<double>(ch);
      for (std::size_t c = 0; c < ch; ++c) y(c, i, j) = (x(c, i, j) - mean) / std::sqrt(var + eps) * scale(c) + offset(c);
    }
  return y;
}

/// O(N M) Chamfer distance.
inline double brute_force_chamfer(const geometry::PointCloud& a, const geometry::PointCloud& b) {
  const auto directed = [](const geometry::PointCloud& from, const geometry::PointCloud& to) {
    double sum = 0.0;
    for (const auto& p : from.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : to.points) best = std::min(best, geometry::squared_distance(p, q));
      sum += best;
    }
    return sum / static_cast<double>(from.size());
  };
  return directed(a, b) + directed(b, a);
}

/// IoU on a dense boolean occupancy grid spanning both clouds' voxel bounds.
inline double dense_grid_iou(const geometry::PointCloud& a, const geometry::PointCloud& b, double voxel) {
  std::int64_t lo[3] = {std::numeric_limits<std::int64_t>::max(), std::numeric_limits<std::int64_t>::max(),
                        std::numeric_limits<std::int64_t>::max()};
  std::int64_t hi[3] = {std::numeric_limits<std::int64_t>::min(), std::numeric_limits<std::int64_t>::min(),
                        std::numeric_limits<std::int64_t>::min()};
  const auto index = [voxel](const geometry::Point3& p) {
    return std::array<std::int64_t, 3>{static_cast<std::int64_t>(std::floor(p.x / voxel)),
                                       static_cast<std::int64_t>(std::floor(p.y / voxel)),
                                       static_cast<std::int64_t>(std::floor(p.z / voxel))};
  };
  for (const auto* cloud : {&a, &b})
    for (const auto& p : cloud->points) {
      const auto k = index(p);
      for (int i = 0; i < 3; ++i) {
        lo[i] = std::min(lo[i], k[i]);
        hi[i] = std::max(hi[i], k[i]);
      }
    }
  const std::size_t nx = static_cast<std::size_t>(hi[0] - lo[0] + 1);
  const std::size_t ny = static_cast<std::size_t>(hi[1] - lo[1] + 1);
  const std::size_t nz = static_cast<std::size_t>(hi[2] - lo[2] + 1);
  std::vector<std::uint8_t> grid(nx * ny * nz, 0);
  const auto mark = [&](const geometry::PointCloud& cloud, std::uint8_t bit) {
    for (const auto& p : cloud.points) {
      const auto k = index(p);
      grid[(static_cast<std::size_t>(k[0] - lo[0]) * ny + static_cast<std::size_t>(k[1] - lo[1])) * nz +
           static_cast<std::size_t>(k[2] - lo[2])] |= bit;
    }
  };
  mark(a, 1);
  mark(b, 2);
  std::size_t inter = 0, uni = 0;
  for (std::uint8_t cell : grid) {
    inter += cell == 3;
    uni += cell != 0;
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Row whose angle is closest to the point's inclination, scanning every beam
/// and recomputing the inclination from that beam's offset.
inline std::size_t brute_force_row(const geometry::Point3& p, const geometry::BeamCalibration& calib) {
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < calib.height(); ++b) {
    const double incl = std::atan2(p.z - calib.delta[b], std::sqrt(p.x * p.x + p.y * p.y));
    const double err = std::abs(calib.phi[b] - incl);
    if (err < best_err) {
      best_err = err;
      best = b;
    }
  }
  return best;
}

}  // namespace rvsr::oracles
