// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rvsr/error.hpp"

namespace rvsr::geometry {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

inline double squared_distance(const Point3& a, const Point3& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

inline bool is_finite(const Point3& p) noexcept {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

/// Points in the sensor frame, meters. May be empty.
struct PointCloud {
  std::vector<Point3> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }

  /// Throws InputError naming the first non-finite point.
  void validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!is_finite(points[i])) {
        throw InputError("point " + std::to_string(i) + " has a non-finite coordinate", i);
      }
    }
  }
};

/// Per-beam vertical geometry of a spinning LiDAR.
///
/// `phi` holds the beam elevation angles in radians, strictly descending from
/// the top beam (row 0) to the bottom beam. `delta` holds each beam's vertical
/// origin offset in meters.
struct BeamCalibration {
  std::vector<double> phi;
  std::vector<double> delta;
  double r_max = 80.0;
  std::size_t width = 1024;

  std::size_t height() const noexcept { return phi.size(); }

  void validate() const {
    if (phi.size() < 2) throw ConfigError("calibration needs at least 2 beams");
    if (phi.size() != delta.size()) {
      throw ConfigError("calibration has " + std::to_string(phi.size()) + " angles but " +
                        std::to_string(delta.size()) + " offsets");
    }
    if (width < 4) throw ConfigError("calibration width must be at least 4");
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw ConfigError("calibration r_max must be positive");
    for (std::size_t b = 0; b < phi.size(); ++b) {
      if (!std::isfinite(phi[b]) || !std::isfinite(delta[b])) {
        throw ConfigError("calibration beam " + std::to_string(b) + " is not finite");
      }
      if (b > 0 && !(phi[b] < phi[b - 1])) {
        throw ConfigError("calibration angles must be strictly descending (beam " + std::to_string(b) + ")");
      }
    }
  }

  bool uniform_offset() const noexcept {
    for (double d : delta) {
      if (d != delta.front()) return false;
    }
    return true;
  }

  /// Largest angular spacing between adjacent beams.
  double max_beam_gap() const noexcept {
    double gap = 0.0;
    for (std::size_t b = 1; b < phi.size(); ++b) gap = std::max(gap, phi[b - 1] - phi[b]);
    return gap;
  }

  /// Uniform fan of `beams` rows from `top_deg` down to `bottom_deg`, zero offsets.
  static BeamCalibration uniform_fan(std::size_t beams, double top_deg, double bottom_deg,
                                     double r_max = 80.0, std::size_t width = 1024) {
    BeamCalibration calib;
    calib.r_max = r_max;
    calib.width = width;
    calib.phi.resize(beams);
    calib.delta.assign(beams, 0.0);
    const double step = beams > 1 ? (top_deg - bottom_deg) / static_cast<double>(beams - 1) : 0.0;
    for (std::size_t b = 0; b < beams; ++b) {
      calib.phi[b] = (top_deg - step * static_cast<double>(b)) * std::numbers::pi / 180.0;
    }
    return calib;
  }

  /// 64-beam fan from +2.0 to -24.8 degrees, HDL-64E-like.
  static BeamCalibration hdl64_like() { return uniform_fan(64, 2.0, -24.8); }

  friend bool operator==(const BeamCalibration&, const BeamCalibration&) = default;
};

/// H x W grid of ranges in meters. Holes are NaN.
class RangeImage {
 public:
  static constexpr float kHole = std::numeric_limits<float>::quiet_NaN();

  RangeImage() = default;

  explicit RangeImage(BeamCalibration calib)
      : calib_(std::move(calib)), values_(calib_.height() * calib_.width, kHole) {}

  RangeImage(BeamCalibration calib, std::vector<float> values)
      : calib_(std::move(calib)), values_(std::move(values)) {
    if (values_.size() != calib_.height() * calib_.width) {
      throw InputError("range image has " + std::to_string(values_.size()) + " values, calibration expects " +
                       std::to_string(calib_.height() * calib_.width));
    }
  }

  std::size_t height() const noexcept { return calib_.height(); }
  std::size_t width() const noexcept { return calib_.width; }
  const BeamCalibration& calibration() const noexcept { return calib_; }

  float at(std::size_t row, std::size_t col) const noexcept { return values_[row * width() + col]; }
  float& at(std::size_t row, std::size_t col) noexcept { return values_[row * width() + col]; }

  bool is_hole(std::size_t row, std::size_t col) const noexcept { return std::isnan(at(row, col)); }

  std::span<const float> values() const noexcept { return values_; }
  std::span<float> values() noexcept { return values_; }

  std::size_t valid_count() const noexcept {
    std::size_t n = 0;
    for (float v : values_) n += std::isnan(v) ? 0 : 1;
    return n;
  }
  std::size_t hole_count() const noexcept { return values_.size() - valid_count(); }

  /// Every non-hole value must lie in (0, r_max].
  void validate() const {
    calib_.validate();
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const float v = values_[i];
      if (std::isnan(v)) continue;
      if (!(v > 0.0f) || static_cast<double>(v) > calib_.r_max) {
        throw InputError("range image pixel " + std::to_string(i) + " outside (0, r_max]", i);
      }
    }
  }

 private:
  BeamCalibration calib_;
  std::vector<float> values_;
};

}  // namespace rvsr::geometry
