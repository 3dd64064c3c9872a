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

#include "annealvq/codebook.hpp"
#include "annealvq/vector_set.hpp"

namespace annealvq {

enum class EntropyEstimator {
  kPlugIn,       // empirical frequencies, no correction
  kGrassberger,  // digamma-based bias correction for undersampled histograms
};

/// Entropy in bits of a histogram. Computed from the sorted nonzero counts,
/// so histograms with the same count multiset give bit-identical results.
double entropy_bits(std::vector<std::uint64_t> counts, EntropyEstimator estimator);

/// Diagonal: H(I_m). Off-diagonal: I(I_a; I_b). Both in bits.
/// H is clamped to [0, log2 K] and MI to [0, min(H_a, H_b)].
struct MiMatrix {
  std::size_t m_count = 0;
  std::size_t samples = 0;
  std::vector<double> values;  // m_count x m_count

  double operator()(std::size_t a, std::size_t b) const noexcept {
    return values[a * m_count + b];
  }
};

struct MiOptions {
  std::size_t sample_cap = 100000;
  std::uint64_t seed = 0;
  EntropyEstimator estimator = EntropyEstimator::kGrassberger;
};

/// MI matrix over a seeded uniform subsample of min(n, sample_cap) rows.
MiMatrix mi_matrix(const EncodedDataset& encoded, const MiOptions& options = {});

/// MI matrix over explicit rows of the code matrix (repetition allowed).
MiMatrix mi_matrix_of_rows(const EncodedDataset& encoded, std::span<const std::uint64_t> rows,
                           EntropyEstimator estimator);

struct LocalityProfile {
  std::vector<double> conditional_entropy;  // L_m = H(I_m | I_1..I_{m−1}), bits
  std::vector<double> prefix_entropy;       // H(I_1..I_m), bits
  std::size_t population = 0;
  MiMatrix local_mi;
};

/// Conditional entropies of the codes of the pooled neighbourhoods: for each
/// ground-truth row, its first `neighborhood_k` ids (the row's own anchor id
/// excluded when anchor ids are present). Entropies of code prefixes come
/// from hashed sparse histograms and L_m follows by the chain rule.
LocalityProfile locality_profile(const EncodedDataset& encoded, const GroundTruth& ground_truth,
                                 std::size_t neighborhood_k,
                                 EntropyEstimator estimator = EntropyEstimator::kGrassberger);

}  // namespace annealvq
