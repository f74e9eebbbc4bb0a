// Copyright 2026 The valclust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cassert>
#include <cstddef>
#include <utility>
#include <vector>

namespace valclust {

/// Upper triangle of a symmetric matrix with zero diagonal, stored row-major
/// as n(n-1)/2 entries.
template <typename T>
class Condensed {
 public:
  Condensed() = default;
  explicit Condensed(std::size_t n) : n_(n), data_(pair_count(n), T{}) {}
  Condensed(std::size_t n, std::vector<T> data) : n_(n), data_(std::move(data)) {
    assert(data_.size() == pair_count(n));
  }

  static constexpr std::size_t pair_count(std::size_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

  /// Position of (i, j), i < j, in the flat array.
  static constexpr std::size_t index(std::size_t n, std::size_t i, std::size_t j) {
    return n * i - i * (i + 1) / 2 + (j - i - 1);
  }

  std::size_t n() const noexcept { return n_; }
  const std::vector<T>& data() const noexcept { return data_; }
  std::vector<T>& data() noexcept { return data_; }

  T operator()(std::size_t i, std::size_t j) const {
    if (i == j) return T{};
    if (i > j) std::swap(i, j);
    return data_[index(n_, i, j)];
  }
  void set(std::size_t i, std::size_t j, T value) {
    assert(i != j);
    if (i > j) std::swap(i, j);
    data_[index(n_, i, j)] = value;
  }

  bool operator==(const Condensed&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

}  // namespace valclust
