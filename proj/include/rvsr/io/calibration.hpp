// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "rvsr/geometry/types.hpp"
#include "rvsr/io/binary.hpp"

namespace rvsr::io {

// Calibration JSON: {"phi_deg": [...], "delta_m": [...], "r_max_m": 80, "width": 1024}

inline geometry::BeamCalibration calibration_from_json(const nlohmann::json& j) {
  geometry::BeamCalibration calib;
  try {
    calib.phi.clear();
    for (double deg : j.at("phi_deg").get<std::vector<double>>()) calib.phi.push_back(deg * std::numbers::pi / 180.0);
    calib.delta = j.at("delta_m").get<std::vector<double>>();
    calib.r_max = j.at("r_max_m").get<double>();
    calib.width = j.at("width").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid calibration: ") + e.what());
  }
  calib.validate();
  return calib;
}

inline nlohmann::json calibration_to_json(const geometry::BeamCalibration& calib) {
  std::vector<double> deg;
  deg.reserve(calib.phi.size());
  for (double rad : calib.phi) deg.push_back(rad * 180.0 / std::numbers::pi);
  return {{"phi_deg", deg}, {"delta_m", calib.delta}, {"r_max_m", calib.r_max}, {"width", calib.width}};
}

/// Missing or malformed calibration files are configuration errors.
inline geometry::BeamCalibration load_calibration(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("calibration file '" + path.string() + "' not found");
  const Bytes bytes = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("calibration file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return calibration_from_json(j);
}

inline void save_calibration(const geometry::BeamCalibration& calib, const std::filesystem::path& path) {
  write_file_atomic(path, calibration_to_json(calib).dump(2) + "\n");
}

}  // namespace rvsr::io
