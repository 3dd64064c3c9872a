// Copyright 2026 The annealvq Authors
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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace annealvq {

/// Dense row-major set of n vectors of dimension d, stored as 32-bit floats.
///
/// An empty set reports d = 0 unless constructed with an explicit dimension.
/// Every stored value is finite; the data constructor rejects NaN/Inf.
class VectorSet {
 public:
  VectorSet() = default;
  VectorSet(std::size_t n, std::size_t d);
  VectorSet(std::size_t n, std::size_t d, std::vector<float> values);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }
  bool empty() const noexcept { return n_ == 0; }

  std::span<const float> row(std::size_t i) const noexcept {
    return {values_.data() + i * d_, d_};
  }
  std::span<float> row(std::size_t i) noexcept {
    return {values_.data() + i * d_, d_};
  }

  const std::vector<float>& values() const noexcept { return values_; }
  std::vector<float>& values() noexcept { return values_; }

  /// Rows [begin, begin + count) copied into a new set.
  VectorSet slice(std::size_t begin, std::size_t count) const;

  /// Rows selected by index, in the given order.
  VectorSet gather(std::span<const std::uint64_t> ids) const;

  friend bool operator==(const VectorSet&, const VectorSet&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<float> values_;
};

/// Exact k nearest base ids per query, ascending by squared distance.
struct GroundTruth {
  std::size_t queries = 0;
  std::size_t depth = 0;  // neighbours per query
  std::vector<std::uint64_t> ids;
  std::vector<double> distances;
  // Base id of each row's anchor when the rows were computed for base
  // vectors themselves; empty for external queries.
  std::vector<std::uint64_t> anchor_ids;

  std::span<const std::uint64_t> row(std::size_t q) const noexcept {
    return {ids.data() + q * depth, depth};
  }
  std::span<const double> row_distances(std::size_t q) const noexcept {
    return {distances.data() + q * depth, depth};
  }
};

}  // namespace annealvq
