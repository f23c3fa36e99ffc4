// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdio>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "rvsr/geometry/projection.hpp"
#include "rvsr/metrics/metrics.hpp"
#include "rvsr/oracles/oracles.hpp"
#include "rvsr/random.hpp"
#include "rvsr/ssm/discretize.hpp"
#include "rvsr/ssm/scan.hpp"
#include "rvsr/ssm/ss2d.hpp"

namespace rvsr {

struct SelfcheckOptions {
  std::uint64_t seed = 20240917;
  /// Runs discretization with its small-|a| limit switched off. Used to prove
  /// the discretization oracle catches the fault.
  bool inject_zoh_fault = false;
};

struct OracleResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace selfcheck_detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline OracleResult timed(const std::string& name, const std::function<std::string()>& body) {
  OracleResult r;
  r.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    r.detail = body();
    r.passed = r.detail.rfind("FAIL", 0) != 0;
  } catch (const std::exception& e) {
    r.detail = std::string("FAIL: exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline std::string check_discretization(Rng& rng, const SelfcheckOptions& opts) {
  ssm::DiscretizeOptions disc;
  if (opts.inject_zoh_fault) disc.taylor_threshold = 0.0;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double a = rng.uniform(-5.0, -0.01);
    const double dt = rng.uniform(0.001, 1.0);
    const double b = rng.uniform(-2.0, 2.0);
    ssm::SsmParams<double> p{BasicTensor<double>({1, 1}, {a}), BasicTensor<double>({1, 1}, {b}),
                             BasicTensor<double>({1, 1}, {1.0}), BasicTensor<double>({1}, {0.0}),
                             BasicTensor<double>({1}, {dt})};
    const auto d = ssm::zoh_discretize(p, disc);
    const double free = oracles::integrate_scalar_ssm(a, b, 0.0, 1.0, dt);
    const double forced = oracles::integrate_scalar_ssm(a, b, 1.0, 0.0, dt);
    worst = std::max({worst, std::abs(d.a_bar(0, 0) - free) / std::abs(free),
                      std::abs(d.b_bar(0, 0) - forced) / std::abs(forced)});
  }
  if (!(worst <= 1e-6)) return "FAIL: worst relative error " + fmt(worst) + " vs ODE integration";
  // The a -> 0 limit must be continuous.
  for (double a : {0.0, 1e-9, -1e-9}) {
    const double b = 1.7, dt = 0.3;
    ssm::SsmParams<double> p{BasicTensor<double>({1, 1}, {a}), BasicTensor<double>({1, 1}, {b}),
                             BasicTensor<double>({1, 1}, {1.0}), BasicTensor<double>({1}, {0.0}),
                             BasicTensor<double>({1}, {dt})};
    const double got = ssm::zoh_discretize(p, disc).b_bar(0, 0);
    if (!(std::abs(got - dt * b) <= 1e-12 * std::abs(b))) {
      return "FAIL: b_bar at a=" + fmt(a) + " is " + fmt(got) + ", limit is " + fmt(dt * b);
    }
  }
  return "max rel err " + fmt(worst);
}

inline std::string check_convolution_kernel(Rng& rng) {
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t dm = 1 + rng.index(3), n = 1 + rng.index(6), len = 1 + rng.index(32);
    BasicTensor<double> a({dm, n}), b({dm, n}), c({dm, n}), d({dm}), dt({dm}), x({dm, len});
    for (double& v : a.data()) v = rng.uniform(-3.0, -0.05);
    for (double& v : b.data()) v = rng.uniform(-1.0, 1.0);
    for (double& v : c.data()) v = rng.uniform(-1.0, 1.0);
    for (double& v : d.data()) v = rng.uniform(-1.0, 1.0);
    for (double& v : dt.data()) v = rng.uniform(0.01, 0.5);
    for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);
    const auto disc = ssm::zoh_discretize(ssm::SsmParams<double>{a, b, c, d, dt});
    const auto y = ssm::scan_1d(disc, x);
    const auto ref = oracles::ssm_convolution(disc.a_bar, disc.b_bar, disc.c, disc.d, x);
    for (std::size_t i = 0; i < y.size(); ++i) worst = std::max(worst, std::abs(y[i] - ref[i]));
  }
  if (!(worst <= 1e-5)) return "FAIL: scan differs from kernel convolution by " + fmt(worst);
  return "max abs err " + fmt(worst);
}

inline std::string check_traversals() {
  for (std::size_t rows = 1; rows <= 5; ++rows)
    for (std::size_t cols = 1; cols <= 7; ++cols)
      for (int k = 0; k < 4; ++k) {
        if (ssm::unfold_order(ssm::kScanDirections[k], rows, cols) != oracles::enumerate_traversal(k, rows, cols)) {
          return "FAIL: " + std::string(ssm::to_string(ssm::kScanDirections[k])) + " on " + std::to_string(rows) +
                 "x" + std::to_string(cols);
        }
      }
  return "all grids up to 5x7";
}

inline geometry::PointCloud random_cloud(Rng& rng, std::size_t n, double extent) {
  geometry::PointCloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.points.push_back({rng.uniform(-extent, extent), rng.uniform(-extent, extent), rng.uniform(-extent, extent)});
  }
  return c;
}

inline std::string check_chamfer(Rng& rng) {
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_cloud(rng, 100, 5.0);
    const auto b = random_cloud(rng, 100, 5.0);
    const double fast = metrics::chamfer(a, b);
    const double slow = oracles::brute_force_chamfer(a, b);
    if (!(std::abs(fast - slow) <= 1e-9)) return "FAIL: k-d tree " + fmt(fast) + " vs brute force " + fmt(slow);
  }
  return "20 pairs of 100 points";
}

inline std::string check_voxel_iou(Rng& rng) {
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_cloud(rng, 50, 1.5);
    const auto b = random_cloud(rng, 50, 1.5);
    const double fast = metrics::voxel_iou(a, b, 0.5);
    const double slow = oracles::dense_grid_iou(a, b, 0.5);
    if (fast != slow) return "FAIL: hashed " + fmt(fast) + " vs dense grid " + fmt(slow);
  }
  return "20 pairs of 50 points";
}

inline std::string check_round_trip(Rng& rng) {
  const geometry::BeamCalibration calib = geometry::BeamCalibration::uniform_fan(32, 10.0, -30.0, 80.0, 512);
  const double top = calib.phi.front(), bottom = calib.phi.back();
  double worst_range = 0.0, worst_yaw = 0.0, worst_pitch = 0.0;
  std::size_t checked = 0;
  for (int i = 0; i < 200; ++i) {
    const double yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double pitch = rng.uniform(bottom, top);
    const double r = rng.uniform(1.0, 70.0);
    const geometry::Point3 p{r * std::cos(pitch) * std::cos(yaw), r * std::cos(pitch) * std::sin(yaw),
                             r * std::sin(pitch)};
    const geometry::RangeImage img = geometry::project({{p}}, calib);
    const auto back = geometry::back_project(img);
    if (back.size() != 1) return "FAIL: single point did not survive projection";
    const auto& q = back.points[0];
    const double yaw_err = std::abs(std::remainder(std::atan2(q.y, q.x) - yaw, 2.0 * std::numbers::pi));
    const double pitch_err = std::abs(std::atan2(q.z, std::hypot(q.x, q.y)) - pitch);
    const double range_err = std::abs(std::sqrt(geometry::squared_distance(q, {})) - r);
    worst_yaw = std::max(worst_yaw, yaw_err);
    worst_pitch = std::max(worst_pitch, pitch_err);
    worst_range = std::max(worst_range, range_err);
    ++checked;
  }
  if (worst_range > 1e-5) return "FAIL: range error " + fmt(worst_range);
  if (worst_yaw > std::numbers::pi / static_cast<double>(calib.width) + 1e-12) return "FAIL: yaw error " + fmt(worst_yaw);
  if (worst_pitch > calib.max_beam_gap()) return "FAIL: pitch error " + fmt(worst_pitch);
  return std::to_string(checked) + " points, max range err " + fmt(worst_range);
}

}  // namespace selfcheck_detail

/// Runs every oracle at small sizes and reports each one.
inline std::vector<OracleResult> run_selfcheck(const SelfcheckOptions& opts = {}) {
  using namespace selfcheck_detail;
  Rng rng(opts.seed);
  std::vector<OracleResult> results;
  results.push_back(timed("zoh-discretization-vs-ode", [&] { return check_discretization(rng, opts); }));
  results.push_back(timed("scan-vs-convolution-kernel", [&] { return check_convolution_kernel(rng); }));
  results.push_back(timed("ss2d-traversal-enumeration", [&] { return check_traversals(); }));
  results.push_back(timed("chamfer-vs-brute-force", [&] { return check_chamfer(rng); }));
  results.push_back(timed("voxel-iou-vs-dense-grid", [&] { return check_voxel_iou(rng); }));
  results.push_back(timed("projection-round-trip", [&] { return check_round_trip(rng); }));
  return results;
}

}  // namespace rvsr
