// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "rvsr/io/binary.hpp"
#include "rvsr/model/config.hpp"
#include "rvsr/model/weights.hpp"

namespace rvsr::model {

// Weight file layout (little-endian):
//   "RVSW" | u32 version | u64 manifest bytes | manifest JSON
//   | float32 payload, tensors in manifest order | u64 FNV-1a-64 of all preceding bytes
//
// The manifest is {"config": {...}, "tensors": [{"name": "block/tensor", "shape": [...]}, ...]}.

inline constexpr std::uint32_t kWeightFormatVersion = 1;
inline constexpr std::size_t kWeightPrefixBytes = 16;
inline constexpr std::size_t kChecksumBytes = 8;

inline io::Bytes encode_weights(const ModelWeights& weights, const NetworkConfig& cfg) {
  check_compatible(weights, cfg);
  nlohmann::json manifest;
  manifest["config"] = config_to_json(cfg);
  manifest["tensors"] = nlohmann::json::array();
  for (const auto& [key, shape] : flat_layout(weights)) manifest["tensors"].push_back({{"name", key}, {"shape", shape}});
  const std::string text = manifest.dump();

  io::Bytes out{'R', 'V', 'S', 'W'};
  io::put_le(out, kWeightFormatVersion);
  io::put_le(out, static_cast<std::uint64_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& [path, block] : weights) {
    for (const auto& [name, t] : block.tensors()) {
      for (float v : t.data()) io::put_f32(out, v);
    }
  }
  io::put_le(out, io::fnv1a64(out));
  return out;
}

inline std::pair<ModelWeights, NetworkConfig> decode_weights(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kWeightPrefixBytes + kChecksumBytes) throw CorruptionError("weight file is truncated");
  const std::size_t body = bytes.size() - kChecksumBytes;
  if (io::fnv1a64(bytes.first(body)) != io::get_le<std::uint64_t>(bytes, body)) {
    throw CorruptionError("weight file checksum mismatch");
  }
  if (bytes[0] != 'R' || bytes[1] != 'V' || bytes[2] != 'S' || bytes[3] != 'W') {
    throw CorruptionError("not a weight file (bad magic)");
  }
  if (io::get_le<std::uint32_t>(bytes, 4) != kWeightFormatVersion) {
    throw IncompatibleError("unsupported weight format version", "version");
  }
  const std::uint64_t manifest_len = io::get_le<std::uint64_t>(bytes, 8);
  if (manifest_len > body - kWeightPrefixBytes) throw CorruptionError("weight manifest overruns the file");

  nlohmann::json manifest;
  try {
    const auto* text = reinterpret_cast<const char*>(bytes.data() + kWeightPrefixBytes);
    manifest = nlohmann::json::parse(text, text + manifest_len);
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError(std::string("weight manifest is not valid JSON: ") + e.what());
  }
  try {
    const NetworkConfig cfg = config_from_json(manifest.at("config"));
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      throw IncompatibleError(std::string("weight manifest config is invalid: ") + e.what(), "config");
    }

    const auto expected = flat_layout(model_layout(cfg));
    const nlohmann::json& listed = manifest.at("tensors");
    const std::size_t common = std::min(expected.size(), listed.size());
    for (std::size_t i = 0; i < common; ++i) {
      const std::string name = listed[i].at("name").get<std::string>();
      if (name != expected[i].first) {
        throw IncompatibleError("weight manifest diverges at '" + expected[i].first + "' (file has '" + name + "')",
                                expected[i].first);
      }
      if (listed[i].at("shape").get<Shape>() != expected[i].second) {
        throw IncompatibleError("tensor '" + name + "' shape differs from config", name);
      }
    }
    if (expected.size() > listed.size()) {
      throw IncompatibleError("weight manifest is missing '" + expected[common].first + "'", expected[common].first);
    }
    if (listed.size() > expected.size()) {
      const std::string extra = listed[common].at("name").get<std::string>();
      throw IncompatibleError("weight manifest has unexpected '" + extra + "'", extra);
    }

    std::size_t floats = 0;
    for (const auto& [key, shape] : expected) floats += element_count(shape);
    const std::size_t payload_start = kWeightPrefixBytes + manifest_len;
    if (body - payload_start != 4 * floats) {
      throw CorruptionError("weight payload is " + std::to_string(body - payload_start) + " bytes, expected " +
                            std::to_string(4 * floats));
    }

    ModelWeights weights;
    std::size_t cursor = payload_start;
    for (const auto& [key, shape] : expected) {
      const std::size_t slash = key.find('/');
      const std::string path = key.substr(0, slash);
      Tensor t(shape);
      for (float& v : t.data()) {
        v = io::get_f32(bytes, cursor);
        cursor += 4;
      }
      auto [it, inserted] = weights.try_emplace(path, path);
      it->second.set(key.substr(slash + 1), std::move(t));
    }
    return {std::move(weights), cfg};
  } catch (const nlohmann::json::exception& e) {
    throw IncompatibleError(std::string("weight manifest is malformed: ") + e.what(), "manifest");
  }
}

inline void save_weights(const ModelWeights& weights, const NetworkConfig& cfg, const std::filesystem::path& path) {
  io::write_file_atomic(path, encode_weights(weights, cfg));
}

inline std::pair<ModelWeights, NetworkConfig> load_weights(const std::filesystem::path& path) {
  return decode_weights(io::read_file(path));
}

}  // namespace rvsr::model
