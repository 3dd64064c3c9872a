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

#include "annealvq/vector_set.hpp"

namespace annealvq {

/// Strictly increasing active-dimension counts ending at the full dimension.
struct DimensionSchedule {
  std::vector<std::size_t> dims;
};

/// dims[i] = ceil(d^((i+1)/stages)), deduplicated, last entry forced to d.
DimensionSchedule dimension_schedule(std::size_t d, std::size_t stages);

/// k codewords of dimension dim plus the assignment they induce.
struct Centroids {
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<float> values;            // k x dim
  std::vector<std::uint32_t> assignment;  // per data point, empty until assigned
  double objective = 0.0;               // Σ squared error over the active dims
  std::vector<double> objective_trace;  // objective after every assignment step

  Centroids() = default;
  Centroids(std::size_t k, std::size_t dim) : k(k), dim(dim), values(k * dim, 0.0f) {}

  std::span<const float> centroid(std::size_t j) const noexcept {
    return {values.data() + j * dim, dim};
  }
  std::span<float> centroid(std::size_t j) noexcept { return {values.data() + j * dim, dim}; }
};

struct KMeansOptions {
  std::size_t max_iters = 30;  // per schedule stage
  std::size_t threads = 1;
};

/// Lloyd iterations from `init`, measuring distance on the first
/// `active_dims` coordinates only. Trailing coordinates are still updated to
/// the mean of the assigned points. A cluster that empties is re-seeded at
/// the point with the largest current error (taken from a cluster that keeps
/// at least one other member). Stops after max_iters updates or when the
/// assignment no longer changes.
Centroids lloyd_kmeans(const VectorSet& data, const Centroids& init, std::size_t active_dims,
                       const KMeansOptions& options = {});

/// Nearest-centroid assignment over the full dimension, with its objective.
Centroids assign_full(const VectorSet& data, const Centroids& centroids, std::size_t threads = 1);

/// K-means with incrementally added PCA dimensions: rotate data and init into
/// the PCA frame of `data`, run Lloyd on each schedule stage warm-starting
/// from the previous one, rotate back. The returned assignment/objective are
/// full-dimensional in the original frame and never worse than `init`'s.
Centroids improved_kmeans(const VectorSet& data, const Centroids& init,
                          const DimensionSchedule& schedule, const KMeansOptions& options = {});

}  // namespace annealvq
