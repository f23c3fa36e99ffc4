// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <concepts>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "rvsr/ssm/scan.hpp"
#include "rvsr/tensor.hpp"

namespace rvsr::ssm {

enum class ScanDirection {
  kRowMajorForward,  // left-to-right, rows top to bottom
  kRowMajorReverse,  // exact reverse of kRowMajorForward
  kColMajorForward,  // top-to-bottom, columns left to right
  kColMajorReverse,  // exact reverse of kColMajorForward
};

inline constexpr std::array<ScanDirection, 4> kScanDirections{
    ScanDirection::kRowMajorForward, ScanDirection::kRowMajorReverse, ScanDirection::kColMajorForward,
    ScanDirection::kColMajorReverse};

inline std::string_view to_string(ScanDirection dir) {
  switch (dir) {
    case ScanDirection::kRowMajorForward: return "row-major-forward";
    case ScanDirection::kRowMajorReverse: return "row-major-reverse";
    case ScanDirection::kColMajorForward: return "col-major-forward";
    case ScanDirection::kColMajorReverse: return "col-major-reverse";
  }
  return "?";
}

/// order[k] = row-major grid index visited at sequence position k.
inline std::vector<std::size_t> unfold_order(ScanDirection dir, std::size_t rows, std::size_t cols) {
  const std::size_t total = rows * cols;
  std::vector<std::size_t> order(total);
  const bool column_major = dir == ScanDirection::kColMajorForward || dir == ScanDirection::kColMajorReverse;
  const bool reversed = dir == ScanDirection::kRowMajorReverse || dir == ScanDirection::kColMajorReverse;
  for (std::size_t k = 0; k < total; ++k) {
    const std::size_t j = reversed ? total - 1 - k : k;
    order[k] = column_major ? (j % rows) * cols + j / rows : j;
  }
  return order;
}

/// Inverse permutation: position[g] = sequence position holding grid index g.
inline std::vector<std::size_t> refold_order(ScanDirection dir, std::size_t rows, std::size_t cols) {
  const std::vector<std::size_t> order = unfold_order(dir, rows, cols);
  std::vector<std::size_t> position(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = k;
  return position;
}

/// (D, H, W) grid -> (D, H*W) sequence along `dir`.
template <typename T>
BasicTensor<T> unfold(const BasicTensor<T>& grid, ScanDirection dir) {
  require_rank(grid, 3, "unfold input");
  const std::size_t channels = grid.dim(0);
  const std::size_t plane = grid.dim(1) * grid.dim(2);
  const std::vector<std::size_t> order = unfold_order(dir, grid.dim(1), grid.dim(2));
  BasicTensor<T> seq({channels, plane});
  for (std::size_t ch = 0; ch < channels; ++ch) {
    const auto src = grid.slice(ch);
    auto dst = seq.slice(ch);
    for (std::size_t k = 0; k < plane; ++k) dst[k] = src[order[k]];
  }
  return seq;
}

/// (D, H*W) sequence along `dir` -> (D, H, W) grid. Inverse of unfold.
template <typename T>
BasicTensor<T> refold(const BasicTensor<T>& seq, ScanDirection dir, std::size_t rows, std::size_t cols) {
  require_rank(seq, 2, "refold input");
  if (seq.dim(1) != rows * cols) throw InputError("refold: sequence length does not match grid");
  const std::size_t channels = seq.dim(0);
  const std::vector<std::size_t> order = unfold_order(dir, rows, cols);
  BasicTensor<T> grid({channels, rows, cols});
  for (std::size_t ch = 0; ch < channels; ++ch) {
    const auto src = seq.slice(ch);
    auto dst = grid.slice(ch);
    for (std::size_t k = 0; k < order.size(); ++k) dst[order[k]] = src[k];
  }
  return grid;
}

/// Four-direction selective scan over a (D, H, W) grid. Each direction has
/// its own projections (indexed as kScanDirections); results are refolded to
/// the grid and summed.
template <std::floating_point T>
BasicTensor<T> ss2d(const BasicTensor<T>& x, std::span<const SelectiveProjections<T>, 4> branches) {
  require_rank(x, 3, "ss2d input");
  const std::size_t rows = x.dim(1);
  const std::size_t cols = x.dim(2);
  if (rows < 1 || cols < 1) throw InputError("ss2d: empty grid");

  BasicTensor<T> out(x.shape());
  for (std::size_t k = 0; k < kScanDirections.size(); ++k) {
    const ScanDirection dir = kScanDirections[k];
    const BasicTensor<T> y = refold(selective_scan_1d(unfold(x, dir), branches[k]), dir, rows, cols);
    auto acc = out.data();
    const auto part = y.data();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += part[i];
  }
  return out;
}

}  // namespace rvsr::ssm
