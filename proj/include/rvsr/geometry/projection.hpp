// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>

#include "rvsr/geometry/types.hpp"

namespace rvsr::geometry {

/// Elevation of `p` as seen from the origin of a beam mounted `offset` meters up.
inline double beam_inclination(const Point3& p, double offset) noexcept {
  return std::atan2(p.z - offset, std::hypot(p.x, p.y));
}

/// Azimuth column: floor((1 - (atan2(y, x) + pi) / 2pi) * W), clamped to [0, W-1].
inline std::size_t azimuth_column(const Point3& p, std::size_t width) noexcept {
  const double yaw = std::atan2(p.y, p.x);
  const double u = (1.0 - (yaw + std::numbers::pi) / (2.0 * std::numbers::pi)) * static_cast<double>(width);
  const double col = std::floor(u);
  if (!(col > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(col), width - 1);
}

/// Yaw at the center of column `col`; inverse of azimuth_column up to quantization.
inline double column_yaw(std::size_t col, std::size_t width) noexcept {
  return (1.0 - (static_cast<double>(col) + 0.5) / static_cast<double>(width)) * 2.0 * std::numbers::pi -
         std::numbers::pi;
}

/// Hough-voted row: the beam whose nominal angle is closest to the point's
/// inclination from that beam's own origin. Ties go to the lower row.
inline std::size_t vote_row(const Point3& p, const BeamCalibration& calib) noexcept {
  const auto& phi = calib.phi;
  if (calib.uniform_offset()) {
    // phi is strictly descending, so the nearest beam brackets the inclination.
    const double incl = beam_inclination(p, calib.delta.front());
    const auto it = std::lower_bound(phi.begin(), phi.end(), incl, std::greater<>());
    if (it == phi.begin()) return 0;
    if (it == phi.end()) return phi.size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - phi.begin());
    const std::size_t lo = hi - 1;
    return std::abs(phi[lo] - incl) <= std::abs(phi[hi] - incl) ? lo : hi;
  }
  std::size_t best = 0;
  double best_err = std::abs(phi[0] - beam_inclination(p, calib.delta[0]));
  for (std::size_t b = 1; b < phi.size(); ++b) {
    const double err = std::abs(phi[b] - beam_inclination(p, calib.delta[b]));
    if (err < best_err) {
      best_err = err;
      best = b;
    }
  }
  return best;
}

/// Largest float not exceeding min(range, r_max).
inline float stored_range(double range, double r_max) noexcept {
  float v = static_cast<float>(std::min(range, r_max));
  while (static_cast<double>(v) > r_max) v = std::nextafter(v, 0.0f);
  return v;
}

/// Projects a point cloud onto the calibration's range-image grid.
///
/// Each point's row comes from vote_row, its column from azimuth_column, and
/// its range is measured from the winning beam's origin and clamped to r_max.
/// When several points share a pixel the nearest one is kept. Points at the
/// beam origin (zero range) cannot be represented and are dropped.
inline RangeImage project(const PointCloud& cloud, const BeamCalibration& calib) {
  calib.validate();
  cloud.validate();

  RangeImage img(calib);
  for (const Point3& p : cloud.points) {
    const std::size_t row = vote_row(p, calib);
    const std::size_t col = azimuth_column(p, calib.width);
    const double dz = p.z - calib.delta[row];
    const double range = std::sqrt(p.x * p.x + p.y * p.y + dz * dz);
    if (!(range > 0.0)) continue;
    const float value = stored_range(range, calib.r_max);
    float& pixel = img.at(row, col);
    if (std::isnan(pixel) || value < pixel) pixel = value;
  }
  return img;
}

/// Lifts every valid pixel back to 3D at its beam angle and column-center yaw.
inline PointCloud back_project(const RangeImage& img) {
  const BeamCalibration& calib = img.calibration();
  PointCloud cloud;
  cloud.points.reserve(img.valid_count());
  for (std::size_t row = 0; row < img.height(); ++row) {
    const double pitch = calib.phi[row];
    const double cos_p = std::cos(pitch);
    const double sin_p = std::sin(pitch);
    for (std::size_t col = 0; col < img.width(); ++col) {
      if (img.is_hole(row, col)) continue;
      const double r = img.at(row, col);
      const double yaw = column_yaw(col, img.width());
      const double rho = r * cos_p;
      cloud.points.push_back({rho * std::cos(yaw), rho * std::sin(yaw), calib.delta[row] + r * sin_p});
    }
  }
  return cloud;
}

}  // namespace rvsr::geometry
