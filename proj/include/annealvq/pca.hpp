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
#include <span>
#include <vector>

#include "annealvq/vector_set.hpp"

namespace annealvq {

/// Orthonormal PCA rotation. Row i of `rotation` is the i-th principal axis;
/// rows are ordered by descending variance.
struct PcaModel {
  std::size_t dim = 0;
  std::vector<double> rotation;  // dim x dim, row-major
  std::vector<double> mean;
  std::vector<double> variances;  // per component, non-increasing

  /// out = R (x − mean)
  void rotate(std::span<const float> x, std::span<float> out) const;
  /// out = Rᵀ y + mean
  void unrotate(std::span<const float> y, std::span<float> out) const;

  VectorSet rotate(const VectorSet& data) const;
  VectorSet unrotate(const VectorSet& data) const;
};

/// Fits a centred PCA. Uses the d x d covariance when n ≥ d and the n x n
/// Gram matrix otherwise; directions the data does not span are completed
/// to a full orthonormal basis, so the rotation is always invertible.
PcaModel pca_fit(const VectorSet& data);

}  // namespace annealvq
