// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>

#include "rvsr/geometry/types.hpp"
#include "rvsr/io/binary.hpp"

namespace rvsr::io {

// RIMG layout: "RIMG" | u16 H | u16 W | H*W float32 ranges, row-major,
// all little-endian. Holes are written as 0, which no valid range can take.

inline constexpr std::size_t kRimgHeaderBytes = 8;

inline Bytes encode_rimg(const geometry::RangeImage& img) {
  constexpr std::size_t kMaxDim = std::numeric_limits<std::uint16_t>::max();
  if (img.height() > kMaxDim || img.width() > kMaxDim) {
    throw ConfigError("range image too large for RIMG export");
  }
  Bytes out{'R', 'I', 'M', 'G'};
  out.reserve(kRimgHeaderBytes + 4 * img.values().size());
  put_le(out, static_cast<std::uint16_t>(img.height()));
  put_le(out, static_cast<std::uint16_t>(img.width()));
  for (float v : img.values()) put_f32(out, std::isnan(v) ? 0.0f : v);
  return out;
}

/// Decodes an RIMG buffer; its dimensions must match `calib`.
inline geometry::RangeImage decode_rimg(std::span<const std::uint8_t> bytes, const geometry::BeamCalibration& calib) {
  if (bytes.size() < kRimgHeaderBytes || bytes[0] != 'R' || bytes[1] != 'I' || bytes[2] != 'M' || bytes[3] != 'G') {
    throw ParseError("missing RIMG header", 0);
  }
  const std::size_t h = get_le<std::uint16_t>(bytes, 4);
  const std::size_t w = get_le<std::uint16_t>(bytes, 6);
  const std::size_t expected = kRimgHeaderBytes + 4 * h * w;
  if (bytes.size() != expected) {
    throw ParseError("RIMG payload is " + std::to_string(bytes.size()) + " bytes, expected " + std::to_string(expected),
                     std::min(bytes.size(), expected));
  }
  if (h != calib.height() || w != calib.width) {
    throw ConfigError("RIMG is " + std::to_string(h) + "x" + std::to_string(w) + " but calibration is " +
                      std::to_string(calib.height()) + "x" + std::to_string(calib.width));
  }
  std::vector<float> values(h * w);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float v = get_f32(bytes, kRimgHeaderBytes + 4 * i);
    values[i] = v == 0.0f ? geometry::RangeImage::kHole : v;
  }
  geometry::RangeImage img(calib, std::move(values));
  img.validate();
  return img;
}

inline void save_rimg(const geometry::RangeImage& img, const std::filesystem::path& path) {
  write_file_atomic(path, encode_rimg(img));
}

inline geometry::RangeImage load_rimg(const std::filesystem::path& path, const geometry::BeamCalibration& calib) {
  return decode_rimg(read_file(path), calib);
}

}  // namespace rvsr::io
