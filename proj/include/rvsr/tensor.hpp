// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rvsr/error.hpp"

namespace rvsr {

using Shape = std::vector<std::size_t>;

inline std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string to_string(const Shape& shape) {
  std::string out = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + ")";
}

/// Dense row-major N-dimensional array.
///
/// Feature maps use the (channels, rows, cols) layout; sequences use
/// (channels, length). Elements are value-initialized unless data is given.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;

  explicit BasicTensor(Shape shape, T fill = T{})
      : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

  BasicTensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != element_count(shape_)) {
      throw InputError("tensor data length " + std::to_string(data_.size()) +
                       " does not match shape " + to_string(shape_));
    }
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  T& operator[](std::size_t flat) noexcept { return data_[flat]; }
  const T& operator[](std::size_t flat) const noexcept { return data_[flat]; }

  template <typename... Idx>
  T& operator()(Idx... idx) noexcept {
    return data_[offset(idx...)];
  }
  template <typename... Idx>
  const T& operator()(Idx... idx) const noexcept {
    return data_[offset(idx...)];
  }

  /// Contiguous slice along the leading axis, e.g. one channel plane.
  std::span<T> slice(std::size_t lead) noexcept {
    const std::size_t stride = data_.size() / shape_[0];
    return std::span<T>(data_).subspan(lead * stride, stride);
  }
  std::span<const T> slice(std::size_t lead) const noexcept {
    const std::size_t stride = data_.size() / shape_[0];
    return std::span<const T>(data_).subspan(lead * stride, stride);
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](T v) { return std::isfinite(v); });
  }

  BasicTensor reshaped(Shape shape) const {
    BasicTensor out = *this;
    if (element_count(shape) != data_.size()) {
      throw InputError("cannot reshape " + to_string(shape_) + " to " + to_string(shape));
    }
    out.shape_ = std::move(shape);
    return out;
  }

  template <typename U>
  BasicTensor<U> cast() const {
    std::vector<U> converted(data_.begin(), data_.end());
    return BasicTensor<U>(shape_, std::move(converted));
  }

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

 private:
  template <typename... Idx>
  std::size_t offset(Idx... idx) const noexcept {
    const std::array<std::size_t, sizeof...(Idx)> index{static_cast<std::size_t>(idx)...};
    assert(index.size() == shape_.size());
    std::size_t flat = 0;
    for (std::size_t i = 0; i < index.size(); ++i) {
      assert(index[i] < shape_[i]);
      flat = flat * shape_[i] + index[i];
    }
    return flat;
  }

  Shape shape_;
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;

/// Throws InputError unless `t` has exactly `expected` shape.
template <typename T>
void require_shape(const BasicTensor<T>& t, const Shape& expected, const char* what) {
  if (t.shape() != expected) {
    throw InputError(std::string(what) + ": expected shape " + to_string(expected) + ", got " +
                     to_string(t.shape()));
  }
}

template <typename T>
void require_rank(const BasicTensor<T>& t, std::size_t rank, const char* what) {
  if (t.rank() != rank) {
    throw InputError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got shape " +
                     to_string(t.shape()));
  }
}

}  // namespace rvsr
