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
#include <vector>

#include "annealvq/codebook.hpp"
#include "annealvq/cross_products.hpp"
#include "annealvq/kmeans.hpp"
#include "annealvq/vector_set.hpp"

namespace annealvq {

struct TrainConfig {
  std::size_t m_count = 8;
  std::size_t k_count = 256;
  std::size_t beam_width = 10;
  std::size_t schedule_stages = 10;  // I of the dimension schedule
  std::size_t sweeps = 5;            // full passes over the dictionaries
  double rel_tol = 1e-3;             // stop when a sweep improves less than this
  std::uint64_t seed = 0;
  std::size_t max_iters = 30;        // Lloyd iterations per schedule stage
  std::size_t threads = 1;

  void validate() const;
};

struct TrainStep {
  std::size_t sweep = 0;       // 0 is the from-scratch growth pass
  std::size_t dictionary = 0;  // index of the dictionary just refitted
  double distortion = 0.0;     // after re-encoding
  double seconds = 0.0;        // cumulative wall time
};

struct TrainReport {
  std::vector<TrainStep> steps;
  double initial_distortion = 0.0;
};

/// x' = e_x + c_m(i_m(x)): the data minus every dictionary except m.
VectorSet heat_up(const VectorSet& data, const Codebook& codebook, const EncodedDataset& codes,
                  std::size_t m);

/// Refits dictionary m to the intermediate set with improved k-means warm
/// started from the current dictionary. Returns the fitted centroids, whose
/// assignment is the new code m of every vector.
Centroids cool_down(const VectorSet& intermediate, Codebook& codebook, std::size_t m,
                    const TrainConfig& config);

struct SweepResult {
  std::vector<TrainStep> steps;
  double distortion = 0.0;
};

/// One heat-up / cool-down / re-encode pass over all dictionaries. The
/// re-encode keeps a vector's current code when the beam finds nothing
/// better, so distortion never increases.
SweepResult da_sweep(const VectorSet& data, Codebook& codebook, CrossProductTable& cross,
                     EncodedDataset& codes, const TrainConfig& config, std::size_t sweep_index);

struct TrainResult {
  Codebook codebook;
  EncodedDataset codes;
  TrainReport report;
};

/// Dictionary annealing from all-zero dictionaries: a greedy growth pass,
/// then up to config.sweeps full sweeps, then variance reordering.
TrainResult train_from_scratch(const VectorSet& data, const TrainConfig& config);

/// Sweeps over an existing codebook and its codes until the stopping rule.
TrainReport refine(const VectorSet& data, Codebook& codebook, EncodedDataset& codes,
                   const TrainConfig& config);

struct OnlineResult {
  Codebook codebook;
  TrainReport report;
};

/// Fits an existing codebook to one new batch: encode, then sweep on the
/// batch alone. No earlier data is retained.
OnlineResult train_online(const Codebook& codebook, const VectorSet& batch,
                          const TrainConfig& config);

}  // namespace annealvq
