// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <vector>

#include <png.h>

#include "rvsr/geometry/types.hpp"
#include "rvsr/io/binary.hpp"

namespace rvsr::io {

/// Maps a range linearly onto [1, 65535]; holes become 0.
inline std::uint16_t png_level(float range, double r_max) noexcept {
  if (std::isnan(range)) return 0;
  const double t = std::clamp(static_cast<double>(range) / r_max, 0.0, 1.0);
  return static_cast<std::uint16_t>(1.0 + std::round(t * 65534.0));
}

/// 16-bit grayscale visualization of a range image. Lossy; RIMG is the
/// authoritative export.
inline void save_png16(const geometry::RangeImage& img, const std::filesystem::path& path) {
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  std::vector<std::uint8_t> rows(h * w * 2);
  for (std::size_t i = 0; i < h * w; ++i) {
    const std::uint16_t level = png_level(img.values()[i], img.calibration().r_max);
    rows[2 * i] = static_cast<std::uint8_t>(level >> 8);  // PNG samples are big-endian
    rows[2 * i + 1] = static_cast<std::uint8_t>(level & 0xff);
  }

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  std::FILE* fp = std::fopen(tmp.c_str(), "wb");
  if (!fp) throw IoError("cannot open '" + tmp.string() + "' for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    std::filesystem::remove(tmp);
    throw IoError("PNG encoding failed for '" + path.string() + "'");
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 16, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t r = 0; r < h; ++r) png_write_row(png, rows.data() + r * w * 2);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
  std::filesystem::rename(tmp, path);
}

}  // namespace rvsr::io
