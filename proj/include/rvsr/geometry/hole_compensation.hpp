// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "rvsr/geometry/types.hpp"

namespace rvsr::geometry {

enum class WindowShape {
  kHorizontal1x3,  // left and right neighbors
  kVertical3x1,    // neighbors above and below
};

inline std::string_view to_string(WindowShape w) {
  return w == WindowShape::kHorizontal1x3 ? "1x3" : "3x1";
}

/// Parses "1x3" or "3x1". Any other text is a ConfigError.
inline WindowShape parse_window(std::string_view text) {
  if (text == "1x3") return WindowShape::kHorizontal1x3;
  if (text == "3x1") return WindowShape::kVertical3x1;
  throw ConfigError("unsupported hole-compensation window '" + std::string(text) + "' (expected 1x3 or 3x1)");
}

/// Fills each hole with the mean of the valid pixels in its window.
///
/// One pass; every read comes from `img`, so filled holes never feed other
/// fills and the result is independent of traversal order. The center is
/// excluded, neighbors outside the image are absent (no azimuth wrap), and a
/// hole whose window holds no valid pixel stays a hole.
inline RangeImage hole_compensate(const RangeImage& img, WindowShape window) {
  RangeImage out = img;
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  const bool vertical = window == WindowShape::kVertical3x1;

  for (std::size_t row = 0; row < h; ++row) {
    for (std::size_t col = 0; col < w; ++col) {
      if (!img.is_hole(row, col)) continue;
      double sum = 0.0;
      int count = 0;
      const auto take = [&](std::size_t r, std::size_t c) {
        const float v = img.at(r, c);
        if (!std::isnan(v)) {
          sum += v;
          ++count;
        }
      };
      if (vertical) {
        if (row > 0) take(row - 1, col);
        if (row + 1 < h) take(row + 1, col);
      } else {
        if (col > 0) take(row, col - 1);
        if (col + 1 < w) take(row, col + 1);
      }
      if (count > 0) out.at(row, col) = static_cast<float>(sum / count);
    }
  }
  return out;
}

/// Applies `window` when present, otherwise returns the image unchanged.
inline RangeImage hole_compensate(const RangeImage& img, std::optional<WindowShape> window) {
  return window ? hole_compensate(img, *window) : img;
}

}  // namespace rvsr::geometry
