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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "annealvq/vector_set.hpp"

namespace annealvq {

using Fingerprint = std::array<std::uint8_t, 32>;
using Code = std::uint16_t;

/// M additive dictionaries of K codewords each, all of dimension d. A code
/// (i_1..i_M) reconstructs to Σ_m c_m(i_m).
///
/// The fingerprint (SHA-256 of dimensions, codewords and order) is refreshed
/// on every mutation, so an index can detect a codebook it was not built for.
class Codebook {
 public:
  Codebook() = default;
  Codebook(std::size_t dim, std::size_t m_count, std::size_t k_count);
  Codebook(std::size_t dim, std::size_t m_count, std::size_t k_count, std::vector<float> codewords,
           std::vector<std::uint32_t> order = {});

  std::size_t dim() const noexcept { return dim_; }
  std::size_t m_count() const noexcept { return m_count_; }
  std::size_t k_count() const noexcept { return k_count_; }

  std::span<const float> codeword(std::size_t m, std::size_t k) const noexcept {
    return {codewords_.data() + (m * k_count_ + k) * dim_, dim_};
  }
  /// K x d block of dictionary m.
  std::span<const float> dictionary(std::size_t m) const noexcept {
    return {codewords_.data() + m * k_count_ * dim_, k_count_ * dim_};
  }
  const std::vector<float>& codewords() const noexcept { return codewords_; }

  /// order()[m] is the original index of the dictionary now at position m.
  std::span<const std::uint32_t> order() const noexcept { return order_; }

  void set_dictionary(std::size_t m, std::span<const float> values);

  const Fingerprint& fingerprint() const noexcept { return fingerprint_; }

  friend bool operator==(const Codebook& a, const Codebook& b) {
    return a.dim_ == b.dim_ && a.m_count_ == b.m_count_ && a.k_count_ == b.k_count_ &&
           a.codewords_ == b.codewords_ && a.order_ == b.order_;
  }

 private:
  void refresh_fingerprint();

  std::size_t dim_ = 0;
  std::size_t m_count_ = 0;
  std::size_t k_count_ = 0;
  std::vector<float> codewords_;
  std::vector<std::uint32_t> order_;
  Fingerprint fingerprint_{};
};

/// N x M code matrix; codes index into the dictionaries of one codebook.
class EncodedDataset {
 public:
  EncodedDataset() = default;
  EncodedDataset(std::size_t n, std::size_t m_count, std::size_t k_count);
  EncodedDataset(std::size_t n, std::size_t m_count, std::size_t k_count, std::vector<Code> codes);

  std::size_t size() const noexcept { return n_; }
  std::size_t m_count() const noexcept { return m_count_; }
  std::size_t k_count() const noexcept { return k_count_; }

  std::span<const Code> row(std::size_t i) const noexcept {
    return {codes_.data() + i * m_count_, m_count_};
  }
  std::span<Code> row(std::size_t i) noexcept { return {codes_.data() + i * m_count_, m_count_}; }
  const std::vector<Code>& codes() const noexcept { return codes_; }

  /// External id of row i (row index when no id map is attached).
  std::uint64_t id(std::size_t i) const noexcept { return ids_.empty() ? i : ids_[i]; }
  const std::vector<std::uint64_t>& id_map() const noexcept { return ids_; }
  void set_id_map(std::vector<std::uint64_t> ids);

  /// Fingerprint of the codebook that produced the codes, when known.
  const Fingerprint* codebook_fingerprint() const noexcept {
    return has_fingerprint_ ? &fingerprint_ : nullptr;
  }
  void set_codebook_fingerprint(const Fingerprint& f) noexcept {
    fingerprint_ = f;
    has_fingerprint_ = true;
  }

  /// Throws InputError when any code is ≥ K.
  void validate() const;

  friend bool operator==(const EncodedDataset& a, const EncodedDataset& b) {
    return a.n_ == b.n_ && a.m_count_ == b.m_count_ && a.k_count_ == b.k_count_ &&
           a.codes_ == b.codes_ && a.ids_ == b.ids_;
  }

 private:
  std::size_t n_ = 0;
  std::size_t m_count_ = 0;
  std::size_t k_count_ = 0;
  std::vector<Code> codes_;
  std::vector<std::uint64_t> ids_;
  Fingerprint fingerprint_{};
  bool has_fingerprint_ = false;
};

std::vector<float> reconstruct(const Codebook& codebook, std::span<const Code> code);

/// Σ_m c_m(i_m) accumulated in double, in dictionary order.
void reconstruct_into(const Codebook& codebook, std::span<const Code> code, std::span<double> out);

/// ‖x − reconstruct(code)‖², accumulated in double.
double squared_error(const Codebook& codebook, std::span<const float> x, std::span<const Code> code);

/// Mean over vectors of the squared reconstruction error.
double distortion(const Codebook& codebook, const VectorSet& data, const EncodedDataset& codes,
                  std::size_t threads = 1);

/// (1/K) Σ_k ‖c_m(k) − mean_k c_m(k)‖²
double dictionary_variance(const Codebook& codebook, std::size_t m);

struct ReorderResult {
  Codebook codebook;
  std::vector<std::uint32_t> permutation;  // new position -> old position
};

/// Stable reordering of the dictionaries by non-increasing variance.
ReorderResult reorder_by_variance(const Codebook& codebook);

/// Rearranges code columns to follow a dictionary permutation.
EncodedDataset permute_codes(const EncodedDataset& codes, std::span<const std::uint32_t> permutation);

}  // namespace annealvq
