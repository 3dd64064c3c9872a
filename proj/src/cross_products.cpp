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

#include "annealvq/cross_products.hpp"

#include "annealvq/errors.hpp"
#include "distance_kernels.hpp"

namespace annealvq {

CrossProductTable::CrossProductTable(const Codebook& codebook)
    : m_count_(codebook.m_count()), k_count_(codebook.k_count()),
      offsets_(m_count_ * m_count_, 0), norms_(m_count_ * k_count_) {
  std::size_t offset = 0;
  for (std::size_t a = 0; a < m_count_; ++a) {
    for (std::size_t b = a + 1; b < m_count_; ++b) {
      offsets_[a * m_count_ + b] = offset;
      offset += k_count_ * k_count_;
    }
  }
  values_.resize(offset);
  for (std::size_t a = 0; a < m_count_; ++a) {
    for (std::size_t b = a + 1; b < m_count_; ++b) compute_pair(codebook, a, b);
  }
  for (std::size_t m = 0; m < m_count_; ++m) {
    for (std::size_t k = 0; k < k_count_; ++k) {
      norms_[m * k_count_ + k] =
          static_cast<float>(detail::squared_norm(codebook.codeword(m, k).data(), codebook.dim()));
    }
  }
  fingerprint_ = codebook.fingerprint();
}

std::size_t CrossProductTable::pair_offset(std::size_t a, std::size_t b) const noexcept {
  return offsets_[a * m_count_ + b];
}

void CrossProductTable::compute_pair(const Codebook& codebook, std::size_t a, std::size_t b) {
  float* block = values_.data() + pair_offset(a, b);
  const std::size_t d = codebook.dim();
  for (std::size_t i = 0; i < k_count_; ++i) {
    const float* ci = codebook.codeword(a, i).data();
    for (std::size_t j = 0; j < k_count_; ++j) {
      block[i * k_count_ + j] = static_cast<float>(detail::dot(ci, codebook.codeword(b, j).data(), d));
    }
  }
}

float CrossProductTable::operator()(std::size_t a, std::size_t i, std::size_t b,
                                    std::size_t j) const noexcept {
  if (a < b) return values_[pair_offset(a, b) + i * k_count_ + j];
  return values_[pair_offset(b, a) + j * k_count_ + i];
}

void CrossProductTable::update_dictionary(const Codebook& codebook, std::size_t m) {
  if (codebook.m_count() != m_count_ || codebook.k_count() != k_count_ || m >= m_count_) {
    throw InputError("CrossProductTable::update_dictionary: shape mismatch");
  }
  for (std::size_t other = 0; other < m_count_; ++other) {
    if (other < m) compute_pair(codebook, other, m);
    if (other > m) compute_pair(codebook, m, other);
  }
  for (std::size_t k = 0; k < k_count_; ++k) {
    norms_[m * k_count_ + k] =
        static_cast<float>(detail::squared_norm(codebook.codeword(m, k).data(), codebook.dim()));
  }
  fingerprint_ = codebook.fingerprint();
}

CrossProductTable cross_products(const Codebook& codebook) { return CrossProductTable(codebook); }

float prefix_epsilon(const CrossProductTable& cross, std::span<const Code> code, std::size_t m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) acc += cross.row(i, code[i], m)[code[m]];
  return static_cast<float>(acc);
}

}  // namespace annealvq
