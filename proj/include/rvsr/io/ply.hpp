// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <string_view>

#include "rvsr/geometry/scan_io.hpp"
#include "rvsr/geometry/types.hpp"
#include "rvsr/io/binary.hpp"

namespace rvsr::io {

/// ASCII PLY with a single `vertex` element carrying float x, y, z.
inline std::string encode_ply(const geometry::PointCloud& cloud) {
  std::string out = "ply\nformat ascii 1.0\nelement vertex " + std::to_string(cloud.size()) +
                    "\nproperty float x\nproperty float y\nproperty float z\nend_header\n";
  out.reserve(out.size() + cloud.size() * 36);
  char line[96];
  for (const geometry::Point3& p : cloud.points) {
    const int n = std::snprintf(line, sizeof line, "%.6f %.6f %.6f\n", p.x, p.y, p.z);
    out.append(line, static_cast<std::size_t>(n));
  }
  return out;
}

/// Reads the ASCII PLY subset written by encode_ply (extra vertex properties
/// after x y z are ignored).
inline geometry::PointCloud decode_ply(std::string_view text) {
  const std::size_t end = text.find("end_header");
  if (text.substr(0, 3) != "ply" || end == std::string_view::npos) throw ParseError("not an ASCII PLY file", 0);
  if (text.find("format ascii") == std::string_view::npos) throw ParseError("only ASCII PLY is supported", 0);
  const std::size_t body = text.find('\n', end);
  const geometry::PointCloud cloud =
      geometry::parse_xyz_text(body == std::string_view::npos ? std::string_view{} : text.substr(body + 1));

  const std::size_t tag = text.find("element vertex ");
  if (tag != std::string_view::npos) {
    const std::size_t declared = std::strtoull(std::string(text.substr(tag + 15, 20)).c_str(), nullptr, 10);
    if (declared != cloud.size()) {
      throw ParseError("PLY declares " + std::to_string(declared) + " vertices but holds " + std::to_string(cloud.size()));
    }
  }
  return cloud;
}

inline void save_ply(const geometry::PointCloud& cloud, const std::filesystem::path& path) {
  write_file_atomic(path, encode_ply(cloud));
}

inline geometry::PointCloud load_ply(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  return decode_ply(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

/// Loads .ply, .bin or .xyz/.txt by extension.
inline geometry::PointCloud load_cloud(const std::filesystem::path& path) {
  if (path.extension() == ".ply") return load_ply(path);
  return geometry::load_scan(path);
}

}  // namespace rvsr::io
