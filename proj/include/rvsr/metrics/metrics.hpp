// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "rvsr/geometry/types.hpp"
#include "rvsr/metrics/kdtree.hpp"

namespace rvsr::metrics {

using geometry::PointCloud;
using geometry::RangeImage;

namespace detail {

inline double mean_nearest_squared(const PointCloud& from, const KdTree& to) {
  double sum = 0.0;
  for (const auto& p : from.points) sum += to.nearest_squared(p);
  return sum / static_cast<double>(from.size());
}

}  // namespace detail

/// Chamfer distance in squared meters:
///   mean_{x in pred} min_{y in gt} |x - y|^2 + mean_{y in gt} min_{x in pred} |y - x|^2
inline double chamfer(const PointCloud& pred, const PointCloud& gt) {
  if (pred.empty() || gt.empty()) throw InputError("chamfer distance needs two non-empty clouds");
  const KdTree pred_index(pred.points);
  const KdTree gt_index(gt.points);
  return detail::mean_nearest_squared(pred, gt_index) + detail::mean_nearest_squared(gt, pred_index);
}

struct VoxelKey {
  std::int64_t x, y, z;
  friend bool operator==(const VoxelKey&, const VoxelKey&) = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

using VoxelSet = std::unordered_set<VoxelKey, VoxelKeyHash>;

inline constexpr double kDefaultVoxelSize = 0.1;

/// Occupied voxels of an origin-anchored grid, index = floor(coord / voxel).
inline VoxelSet voxelize(const PointCloud& cloud, double voxel) {
  VoxelSet set;
  set.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    set.insert({static_cast<std::int64_t>(std::floor(p.x / voxel)), static_cast<std::int64_t>(std::floor(p.y / voxel)),
                static_cast<std::int64_t>(std::floor(p.z / voxel))});
  }
  return set;
}

/// |V_pred n V_gt| / |V_pred u V_gt| over occupied voxels. Undefined (error)
/// when both clouds are empty.
inline double voxel_iou(const PointCloud& pred, const PointCloud& gt, double voxel = kDefaultVoxelSize) {
  if (!(voxel > 0.0)) throw ConfigError("voxel size must be positive");
  if (pred.empty() && gt.empty()) throw InputError("voxel IoU is undefined for two empty clouds");
  const VoxelSet a = voxelize(pred, voxel);
  const VoxelSet b = voxelize(gt, voxel);
  std::size_t inter = 0;
  for (const auto& k : a) inter += b.count(k);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Mean |pred - gt| / r_max over pixels where gt is valid; a hole in pred
/// counts as 0 there.
inline double range_mae(const RangeImage& pred, const RangeImage& gt) {
  if (pred.height() != gt.height() || pred.width() != gt.width()) {
    throw InputError("range_mae: image dims differ (" + std::to_string(pred.height()) + "x" +
                     std::to_string(pred.width()) + " vs " + std::to_string(gt.height()) + "x" +
                     std::to_string(gt.width()) + ")");
  }
  const double r_max = gt.calibration().r_max;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < gt.values().size(); ++i) {
    const float g = gt.values()[i];
    if (std::isnan(g)) continue;
    const float p = pred.values()[i];
    const double pv = std::isnan(p) ? 0.0 : static_cast<double>(p);
    sum += std::abs(pv - static_cast<double>(g)) / r_max;
    ++count;
  }
  if (count == 0) throw InputError("range_mae: ground truth has no valid pixels");
  return sum / static_cast<double>(count);
}

// ---------------------------------------------------------------------------

/// Half-open horizontal-radius interval [min_m, max_m).
struct DistanceBand {
  double min_m = 0.0;
  double max_m = 0.0;
};

inline std::vector<DistanceBand> default_bands() { return {{0, 10}, {10, 20}, {20, 30}, {30, 40}, {40, 50}}; }

struct BandMetrics {
  DistanceBand band;
  std::size_t pred_points = 0;
  std::size_t gt_points = 0;
  std::optional<double> cd;   // absent unless both subsets are non-empty
  std::optional<double> iou;  // absent when both subsets are empty
};

struct MetricsReport {
  double cd = 0.0;
  double iou = 0.0;
  std::optional<double> mae;
  std::vector<BandMetrics> bands;
};

inline double horizontal_radius(const geometry::Point3& p) noexcept { return std::hypot(p.x, p.y); }

inline PointCloud select_band(const PointCloud& cloud, const DistanceBand& band) {
  PointCloud out;
  for (const auto& p : cloud.points) {
    const double r = horizontal_radius(p);
    if (r >= band.min_m && r < band.max_m) out.points.push_back(p);
  }
  return out;
}

/// Whole-cloud chamfer and IoU plus per-band values on the radius partitions.
inline MetricsReport banded_report(const PointCloud& pred, const PointCloud& gt,
                                   const std::vector<DistanceBand>& bands = default_bands(),
                                   double voxel = kDefaultVoxelSize) {
  for (std::size_t i = 0; i < bands.size(); ++i) {
    if (!(bands[i].min_m < bands[i].max_m) || (i > 0 && bands[i].min_m < bands[i - 1].max_m)) {
      throw ConfigError("distance bands must be ordered and disjoint");
    }
  }
  MetricsReport report;
  report.cd = chamfer(pred, gt);
  report.iou = voxel_iou(pred, gt, voxel);
  for (const DistanceBand& band : bands) {
    const PointCloud p = select_band(pred, band);
    const PointCloud g = select_band(gt, band);
    BandMetrics m{band, p.size(), g.size(), std::nullopt, std::nullopt};
    if (!p.empty() && !g.empty()) m.cd = chamfer(p, g);
    if (!p.empty() || !g.empty()) m.iou = voxel_iou(p, g, voxel);
    report.bands.push_back(m);
  }
  return report;
}

inline nlohmann::json to_json(const MetricsReport& r) {
  const auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json bands = nlohmann::json::array();
  for (const BandMetrics& b : r.bands) {
    bands.push_back({{"min_m", b.band.min_m},
                     {"max_m", b.band.max_m},
                     {"pred_points", b.pred_points},
                     {"gt_points", b.gt_points},
                     {"cd", opt(b.cd)},
                     {"iou", opt(b.iou)}});
  }
  return {{"cd", r.cd}, {"iou", r.iou}, {"mae", opt(r.mae)}, {"bands", bands}};
}

}  // namespace rvsr::metrics
