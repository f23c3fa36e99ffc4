// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdlib>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "rvsr/geometry/types.hpp"
#include "rvsr/io/binary.hpp"

namespace rvsr::geometry {

enum class ScanFormat {
  kKittiBin,  // little-endian float32 records of x, y, z, intensity
  kXyzText,   // whitespace-separated ASCII, first three columns per line
};

inline constexpr std::size_t kKittiRecordBytes = 16;

/// ".bin" is kitti-bin; ".xyz" and ".txt" are xyz-text.
inline ScanFormat scan_format_from_path(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".bin") return ScanFormat::kKittiBin;
  if (ext == ".xyz" || ext == ".txt") return ScanFormat::kXyzText;
  throw ConfigError("cannot infer scan format from extension '" + ext + "' (expected .bin, .xyz or .txt)");
}

/// Decodes kitti-bin records. Intensity is discarded.
inline PointCloud parse_kitti_bin(std::span<const std::uint8_t> bytes) {
  PointCloud cloud;
  const std::size_t records = bytes.size() / kKittiRecordBytes;
  if (bytes.size() % kKittiRecordBytes != 0) {
    const std::size_t offset = records * kKittiRecordBytes;
    throw ParseError("truncated kitti-bin record at byte offset " + std::to_string(offset), offset);
  }
  cloud.points.reserve(records);
  for (std::size_t i = 0; i < records; ++i) {
    const std::size_t base = i * kKittiRecordBytes;
    const Point3 p{io::get_f32(bytes, base), io::get_f32(bytes, base + 4), io::get_f32(bytes, base + 8)};
    if (!is_finite(p)) {
      throw InputError("point " + std::to_string(i) + " has a non-finite coordinate", i);
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

/// Decodes xyz-text. Blank lines and lines starting with '#' are skipped;
/// columns past the third are ignored.
inline PointCloud parse_xyz_text(std::string_view text) {
  PointCloud cloud;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;

    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;

    // strtod accepts "nan" and "inf", which are rejected below as non-finite input.
    const std::string owned(line);
    const char* cursor = owned.c_str();
    double xyz[3];
    for (double& v : xyz) {
      char* end = nullptr;
      v = std::strtod(cursor, &end);
      if (end == cursor) {
        throw ParseError("xyz-text line " + std::to_string(line_no) + " needs three numeric columns", line_no);
      }
      cursor = end;
    }
    const Point3 p{xyz[0], xyz[1], xyz[2]};
    if (!is_finite(p)) {
      const std::size_t index = cloud.points.size();
      throw InputError("point " + std::to_string(index) + " (line " + std::to_string(line_no) +
                           ") has a non-finite coordinate",
                       index);
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

inline PointCloud load_scan(const std::filesystem::path& path, ScanFormat format) {
  const io::Bytes bytes = io::read_file(path);
  if (format == ScanFormat::kKittiBin) return parse_kitti_bin(bytes);
  return parse_xyz_text(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

inline PointCloud load_scan(const std::filesystem::path& path) {
  return load_scan(path, scan_format_from_path(path));
}

inline io::Bytes encode_kitti_bin(const PointCloud& cloud, float intensity = 0.0f) {
  io::Bytes out;
  out.reserve(cloud.size() * kKittiRecordBytes);
  for (const Point3& p : cloud.points) {
    io::put_f32(out, static_cast<float>(p.x));
    io::put_f32(out, static_cast<float>(p.y));
    io::put_f32(out, static_cast<float>(p.z));
    io::put_f32(out, intensity);
  }
  return out;
}

}  // namespace rvsr::geometry
