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

#include "annealvq/codebook.hpp"

namespace annealvq {

/// Inner products between codewords of every pair of distinct dictionaries
/// plus per-codeword squared norms. Only pairs a < b are stored, as K x K
/// blocks indexed [i_a][i_b].
class CrossProductTable {
 public:
  CrossProductTable() = default;
  explicit CrossProductTable(const Codebook& codebook);

  std::size_t m_count() const noexcept { return m_count_; }
  std::size_t k_count() const noexcept { return k_count_; }

  /// c_a(i)ᵀc_b(j) for any a ≠ b.
  float operator()(std::size_t a, std::size_t i, std::size_t b, std::size_t j) const noexcept;

  /// For a < b: the K products c_a(i)ᵀc_b(·).
  std::span<const float> row(std::size_t a, std::size_t i, std::size_t b) const noexcept {
    return {values_.data() + pair_offset(a, b) + i * k_count_, k_count_};
  }

  float norm_sq(std::size_t m, std::size_t k) const noexcept { return norms_[m * k_count_ + k]; }

  /// Recomputes every block that involves dictionary m.
  void update_dictionary(const Codebook& codebook, std::size_t m);

  const Fingerprint& fingerprint() const noexcept { return fingerprint_; }

 private:
  std::size_t pair_offset(std::size_t a, std::size_t b) const noexcept;
  void compute_pair(const Codebook& codebook, std::size_t a, std::size_t b);

  std::size_t m_count_ = 0;
  std::size_t k_count_ = 0;
  std::vector<std::size_t> offsets_;  // m_count x m_count, valid for a < b
  std::vector<float> values_;
  std::vector<float> norms_;
  Fingerprint fingerprint_{};
};

CrossProductTable cross_products(const Codebook& codebook);

/// ε of the prefix ending at dictionary m: Σ_{i<m} c_m(code[m])ᵀc_i(code[i]),
/// summed in double in increasing i and rounded to float. This is the value
/// the tree stores per node and the exhaustive scan uses per code.
float prefix_epsilon(const CrossProductTable& cross, std::span<const Code> code, std::size_t m);

/// One step of the exact distance recurrence
///   ‖q − T' − c‖² = ‖q − T'‖² + ‖q − c‖² − ‖q‖² + 2 cᵀT'.
inline double extend_distance(double parent, double table_entry, double query_norm_sq,
                              float epsilon) noexcept {
  return parent + (table_entry - query_norm_sq) + 2.0 * static_cast<double>(epsilon);
}

}  // namespace annealvq
