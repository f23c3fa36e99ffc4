// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rvsr/geometry/types.hpp"

namespace rvsr::metrics {

/// Static 3-D k-d tree answering exact nearest-neighbor squared distances.
///
/// Distances are computed with geometry::squared_distance, so query results
/// are bit-identical to a linear scan over the same points.
class KdTree {
 public:
  explicit KdTree(std::span<const geometry::Point3> points) : points_(points.begin(), points.end()) {
    if (!points_.empty()) root_ = build(0, points_.size());
  }

  bool empty() const noexcept { return points_.empty(); }

  /// Squared distance from `q` to its nearest stored point (+inf when empty).
  double nearest_squared(const geometry::Point3& q) const {
    double best = std::numeric_limits<double>::infinity();
    if (!points_.empty()) search(root_, q, best);
    return best;
  }

 private:
  static constexpr std::size_t kLeafSize = 8;
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    int axis = -1;  // -1 marks a leaf
    double split = 0.0;
    std::uint32_t left = kNone;
    std::uint32_t right = kNone;
  };

  static double coord(const geometry::Point3& p, int axis) noexcept {
    return axis == 0 ? p.x : axis == 1 ? p.y : p.z;
  }

  std::uint32_t build(std::size_t begin, std::size_t end) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeafSize) return id;

    double lo[3] = {coord(points_[begin], 0), coord(points_[begin], 1), coord(points_[begin], 2)};
    double hi[3] = {lo[0], lo[1], lo[2]};
    for (std::size_t i = begin; i < end; ++i) {
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], coord(points_[i], a));
        hi[a] = std::max(hi[a], coord(points_[i], a));
      }
    }
    int axis = 0;
    for (int a = 1; a < 3; ++a) {
      if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
    }
    if (hi[axis] == lo[axis]) return id;  // all points coincide

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(points_.begin() + static_cast<std::ptrdiff_t>(begin),
                     points_.begin() + static_cast<std::ptrdiff_t>(mid),
                     points_.begin() + static_cast<std::ptrdiff_t>(end),
                     [axis](const geometry::Point3& a, const geometry::Point3& b) {
                       return coord(a, axis) < coord(b, axis);
                     });
    const double split = coord(points_[mid], axis);
    const std::uint32_t left = build(begin, mid);
    const std::uint32_t right = build(mid, end);
    Node& node = nodes_[id];
    node.axis = axis;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
  }

  // Left subtree holds coordinates <= split, right subtree >= split.
  void search(std::uint32_t id, const geometry::Point3& q, double& best) const {
    const Node& node = nodes_[id];
    if (node.axis < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) best = std::min(best, geometry::squared_distance(q, points_[i]));
      return;
    }
    const double diff = coord(q, node.axis) - node.split;
    const std::uint32_t near = diff <= 0.0 ? node.left : node.right;
    const std::uint32_t far = diff <= 0.0 ? node.right : node.left;
    search(near, q, best);
    if (diff * diff < best) search(far, q, best);
  }

  std::vector<geometry::Point3> points_;
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
};

}  // namespace rvsr::metrics
