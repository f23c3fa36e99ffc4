// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace rvsr {

enum class ErrorKind {
  kConfig,        // invalid calibration, network config, window shape
  kInput,         // malformed in-memory input (non-finite point, shape mismatch)
  kParse,         // malformed file contents
  kIo,            // file cannot be opened or written
  kNumerical,     // non-finite activation during inference
  kIncompatible,  // weights do not match the network layout
  kCorruption,    // checksum mismatch or truncated weight payload
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : Error(ErrorKind::kInput, what), index_(index) {}

  /// Offending element (point index, pixel index) when one can be named.
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::optional<std::size_t> offset = std::nullopt)
      : Error(ErrorKind::kParse, what), offset_(offset) {}

  /// Byte offset (binary formats) or line number (text formats) of the failure.
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  std::optional<std::size_t> offset_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::string block_path)
      : Error(ErrorKind::kNumerical, what), block_path_(std::move(block_path)) {}

  const std::string& block_path() const noexcept { return block_path_; }

 private:
  std::string block_path_;
};

class IncompatibleError : public Error {
 public:
  IncompatibleError(const std::string& what, std::string key)
      : Error(ErrorKind::kIncompatible, what), key_(std::move(key)) {}

  /// First key at which the two layouts diverge.
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class CorruptionError : public Error {
 public:
  explicit CorruptionError(const std::string& what) : Error(ErrorKind::kCorruption, what) {}
};

/// Process exit code contract of the command-line tool.
inline int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInput:
    case ErrorKind::kParse:
    case ErrorKind::kIo:
      return 2;
    case ErrorKind::kConfig:
      return 3;
    case ErrorKind::kNumerical:
      return 4;
    case ErrorKind::kIncompatible:
    case ErrorKind::kCorruption:
      return 5;
  }
  return 2;
}

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kConfig:
      return "config";
    case ErrorKind::kInput:
      return "input";
    case ErrorKind::kParse:
      return "parse";
    case ErrorKind::kIo:
      return "io";
    case ErrorKind::kNumerical:
      return "numerical";
    case ErrorKind::kIncompatible:
      return "incompatible";
    case ErrorKind::kCorruption:
      return "corruption";
  }
  return "unknown";
}

}  // namespace rvsr
