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

#include "annealvq/vector_set.hpp"

namespace annealvq {

enum class SyntheticMode { kGaussianMixture, kUniform };

struct SyntheticSpec {
  SyntheticMode mode = SyntheticMode::kGaussianMixture;
  std::size_t clusters = 64;
  double spread = 0.05;  // per-coordinate noise standard deviation
};

/// Deterministic synthetic data.
///
/// Mixture centres are drawn uniformly in [0,1]^d from `seed` alone; point i
/// belongs to cluster i mod clusters and gets isotropic Gaussian noise.
/// `sample_stream` selects an independent point stream over the same
/// centres, which is how query sets are drawn from the base distribution.
VectorSet generate_synthetic(std::size_t n, std::size_t d, const SyntheticSpec& spec,
                             std::uint64_t seed, std::uint64_t sample_stream = 0);

}  // namespace annealvq
