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

#include "annealvq/synthetic.hpp"

#include <random>
#include <string>

#include "annealvq/errors.hpp"
#include "annealvq/rng.hpp"

namespace annealvq {

VectorSet generate_synthetic(std::size_t n, std::size_t d, const SyntheticSpec& spec,
                             std::uint64_t seed, std::uint64_t sample_stream) {
  if (n == 0 || d == 0) throw InputError("generate_synthetic: n and d must be at least 1");
  VectorSet out(n, d);
  std::mt19937_64 points(splitmix64(derive_seed(seed, "points") + sample_stream));

  if (spec.mode == SyntheticMode::kUniform) {
    std::uniform_real_distribution<float> unit(0.0f, 1.0f);
    for (float& v : out.values()) v = unit(points);
    return out;
  }

  if (spec.clusters == 0 || spec.clusters > n) {
    throw InputError("generate_synthetic: cluster count " + std::to_string(spec.clusters) +
                     " must be in [1, n = " + std::to_string(n) + "]");
  }
  if (spec.spread < 0.0) throw InputError("generate_synthetic: spread must be non-negative");

  std::mt19937_64 centre_rng(derive_seed(seed, "centres"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> centres(spec.clusters * d);
  for (double& c : centres) c = unit(centre_rng);

  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* centre = centres.data() + (i % spec.clusters) * d;
    auto row = out.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = static_cast<float>(centre[j] + spec.spread * noise(points));
    }
  }
  return out;
}

}  // namespace annealvq
