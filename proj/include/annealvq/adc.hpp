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
#include "annealvq/cross_products.hpp"

namespace annealvq {

/// Per-query table of ‖q − c_m(k)‖² for every dictionary and codeword.
class AdcTable {
 public:
  AdcTable() = default;
  AdcTable(std::size_t m_count, std::size_t k_count, double query_norm_sq)
      : m_count_(m_count), k_count_(k_count), query_norm_sq_(query_norm_sq),
        values_(m_count * k_count, 0.0) {}

  std::size_t m_count() const noexcept { return m_count_; }
  std::size_t k_count() const noexcept { return k_count_; }
  double query_norm_sq() const noexcept { return query_norm_sq_; }

  double operator()(std::size_t m, std::size_t k) const noexcept {
    return values_[m * k_count_ + k];
  }
  double& at(std::size_t m, std::size_t k) noexcept { return values_[m * k_count_ + k]; }
  std::span<const double> dictionary(std::size_t m) const noexcept {
    return {values_.data() + m * k_count_, k_count_};
  }

 private:
  std::size_t m_count_ = 0;
  std::size_t k_count_ = 0;
  double query_norm_sq_ = 0.0;
  std::vector<double> values_;
};

AdcTable adc_table(const Codebook& codebook, std::span<const float> q);

/// ‖q − reconstruct(code)‖² from table lookups and cross products:
///   Σ_m ‖q − c_m(i_m)‖² − (M−1)‖q‖² + 2 Σ_{a<b} c_a(i_a)ᵀc_b(i_b),
/// evaluated one dictionary at a time with extend_distance.
double adc_distance(const AdcTable& table, const CrossProductTable& cross,
                    std::span<const Code> code);

struct Neighbor {
  std::uint64_t id = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Strict weak order on (distance, id).
inline bool closer(const Neighbor& a, const Neighbor& b) noexcept {
  return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
}

/// Exhaustive ADC over an encoded dataset. Per-code ε terms are computed once
/// at construction so a query costs M lookups and additions per vector; the
/// distances are bit-identical to adc_distance.
class AdcScanner {
 public:
  AdcScanner(const Codebook& codebook, const CrossProductTable& cross,
             const EncodedDataset& encoded);

  /// Top-r by (distance, id). Throws InputError when r > n.
  std::vector<Neighbor> search(std::span<const float> q, std::size_t r) const;

  const Codebook& codebook() const noexcept { return codebook_; }
  const EncodedDataset& encoded() const noexcept { return encoded_; }

 private:
  const Codebook& codebook_;
  const EncodedDataset& encoded_;
  std::vector<float> epsilons_;  // n x M
};

std::vector<Neighbor> exhaustive_adc_search(const Codebook& codebook,
                                            const EncodedDataset& encoded,
                                            std::span<const float> q, std::size_t r);

}  // namespace annealvq
