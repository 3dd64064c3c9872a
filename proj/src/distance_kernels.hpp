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

namespace annealvq::detail {

/// Squared L2 over the first n coordinates, accumulated in double.
inline double squared_l2(const float* a, const float* b, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double diff = static_cast<double>(a[j]) - static_cast<double>(b[j]);
    acc += diff * diff;
  }
  return acc;
}

inline double squared_norm(const float* a, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += static_cast<double>(a[j]) * a[j];
  return acc;
}

inline double dot(const float* a, const float* b, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += static_cast<double>(a[j]) * b[j];
  return acc;
}

}  // namespace annealvq::detail
