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

#include "annealvq/vector_set.hpp"

#include <cmath>
#include <string>

#include "annealvq/errors.hpp"

namespace annealvq {

VectorSet::VectorSet(std::size_t n, std::size_t d) : n_(n), d_(d), values_(n * d, 0.0f) {}

VectorSet::VectorSet(std::size_t n, std::size_t d, std::vector<float> values)
    : n_(n), d_(d), values_(std::move(values)) {
  if (values_.size() != n * d) {
    throw InputError("VectorSet: " + std::to_string(values_.size()) + " values for " +
                     std::to_string(n) + " x " + std::to_string(d));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InputError("VectorSet: non-finite value in row " + std::to_string(i / d));
    }
  }
}

VectorSet VectorSet::slice(std::size_t begin, std::size_t count) const {
  if (begin + count > n_) throw InputError("VectorSet::slice out of range");
  std::vector<float> out(values_.begin() + static_cast<std::ptrdiff_t>(begin * d_),
                         values_.begin() + static_cast<std::ptrdiff_t>((begin + count) * d_));
  VectorSet result(count, d_);
  result.values_ = std::move(out);
  return result;
}

VectorSet VectorSet::gather(std::span<const std::uint64_t> ids) const {
  VectorSet result(ids.size(), d_);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= n_) throw InputError("VectorSet::gather id out of range");
    const auto src = row(static_cast<std::size_t>(ids[i]));
    std::copy(src.begin(), src.end(), result.row(i).begin());
  }
  return result;
}

}  // namespace annealvq
