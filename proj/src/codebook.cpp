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

#include "annealvq/codebook.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <numeric>
#include <string>

#include "annealvq/errors.hpp"
#include "annealvq/parallel.hpp"
#include "binary_io.hpp"

namespace annealvq {
namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) {
      throw InvariantError("SHA-256 initialisation failed");
    }
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  template <typename T>
  void update(std::span<const T> values) {
    if constexpr (std::endian::native == std::endian::little) {
      EVP_DigestUpdate(ctx_, values.data(), values.size_bytes());
      return;
    }
    for (T v : values) {
      v = detail::byteswap_if_big(v);
      EVP_DigestUpdate(ctx_, &v, sizeof(T));
    }
  }

  void update_u32(std::uint32_t v) { update(std::span<const std::uint32_t>(&v, 1)); }

  Fingerprint finish() {
    Fingerprint out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, out.data(), &len);
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

Codebook::Codebook(std::size_t dim, std::size_t m_count, std::size_t k_count)
    : Codebook(dim, m_count, k_count, std::vector<float>(dim * m_count * k_count, 0.0f), {}) {}

Codebook::Codebook(std::size_t dim, std::size_t m_count, std::size_t k_count,
                   std::vector<float> codewords, std::vector<std::uint32_t> order)
    : dim_(dim), m_count_(m_count), k_count_(k_count), codewords_(std::move(codewords)),
      order_(std::move(order)) {
  if (dim == 0 || m_count == 0 || k_count == 0) {
    throw InputError("Codebook: d, M and K must all be at least 1");
  }
  if (k_count > 65536) throw InputError("Codebook: K must not exceed 65536");
  if (codewords_.size() != dim * m_count * k_count) {
    throw InputError("Codebook: expected " + std::to_string(dim * m_count * k_count) +
                     " codeword values, got " + std::to_string(codewords_.size()));
  }
  if (order_.empty()) {
    order_.resize(m_count);
    std::iota(order_.begin(), order_.end(), 0u);
  }
  std::vector<std::uint32_t> sorted(order_);
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t m = 0; m < sorted.size(); ++m) {
    if (sorted.size() != m_count || sorted[m] != m) {
      throw InputError("Codebook: order is not a permutation of the dictionaries");
    }
  }
  refresh_fingerprint();
}

void Codebook::set_dictionary(std::size_t m, std::span<const float> values) {
  if (m >= m_count_ || values.size() != k_count_ * dim_) {
    throw InputError("Codebook::set_dictionary: shape mismatch");
  }
  std::copy(values.begin(), values.end(),
            codewords_.begin() + static_cast<std::ptrdiff_t>(m * k_count_ * dim_));
  refresh_fingerprint();
}

void Codebook::refresh_fingerprint() {
  Sha256 sha;
  sha.update_u32(static_cast<std::uint32_t>(dim_));
  sha.update_u32(static_cast<std::uint32_t>(m_count_));
  sha.update_u32(static_cast<std::uint32_t>(k_count_));
  sha.update(std::span<const float>(codewords_));
  sha.update(std::span<const std::uint32_t>(order_));
  fingerprint_ = sha.finish();
}

EncodedDataset::EncodedDataset(std::size_t n, std::size_t m_count, std::size_t k_count)
    : n_(n), m_count_(m_count), k_count_(k_count), codes_(n * m_count, 0) {}

EncodedDataset::EncodedDataset(std::size_t n, std::size_t m_count, std::size_t k_count,
                               std::vector<Code> codes)
    : n_(n), m_count_(m_count), k_count_(k_count), codes_(std::move(codes)) {
  if (codes_.size() != n * m_count) throw InputError("EncodedDataset: code count mismatch");
}

void EncodedDataset::set_id_map(std::vector<std::uint64_t> ids) {
  if (!ids.empty() && ids.size() != n_) throw InputError("EncodedDataset: id map size mismatch");
  ids_ = std::move(ids);
}

void EncodedDataset::validate() const {
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    if (codes_[i] >= k_count_) {
      throw InputError("EncodedDataset: code " + std::to_string(codes_[i]) + " of row " +
                       std::to_string(i / m_count_) + " is not below K = " +
                       std::to_string(k_count_));
    }
  }
}

void reconstruct_into(const Codebook& codebook, std::span<const Code> code, std::span<double> out) {
  if (code.size() != codebook.m_count() || out.size() != codebook.dim()) {
    throw InputError("reconstruct: code length or output size mismatch");
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t m = 0; m < code.size(); ++m) {
    if (code[m] >= codebook.k_count()) {
      throw InputError("reconstruct: code " + std::to_string(code[m]) + " is not below K = " +
                       std::to_string(codebook.k_count()));
    }
    const auto c = codebook.codeword(m, code[m]);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += c[j];
  }
}

std::vector<float> reconstruct(const Codebook& codebook, std::span<const Code> code) {
  std::vector<double> acc(codebook.dim());
  reconstruct_into(codebook, code, acc);
  return {acc.begin(), acc.end()};
}

double squared_error(const Codebook& codebook, std::span<const float> x, std::span<const Code> code) {
  std::vector<double> acc(codebook.dim());
  reconstruct_into(codebook, code, acc);
  double err = 0.0;
  for (std::size_t j = 0; j < acc.size(); ++j) {
    const double diff = static_cast<double>(x[j]) - acc[j];
    err += diff * diff;
  }
  return err;
}

double distortion(const Codebook& codebook, const VectorSet& data, const EncodedDataset& codes,
                  std::size_t threads) {
  if (data.size() != codes.size() || codes.m_count() != codebook.m_count() ||
      (!data.empty() && data.dim() != codebook.dim())) {
    throw InputError("distortion: data, codes and codebook shapes disagree");
  }
  if (data.empty()) return 0.0;
  std::vector<double> errors(data.size());
  parallel_for(data.size(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) errors[i] = squared_error(codebook, data.row(i), codes.row(i));
  });
  double total = 0.0;
  for (double e : errors) total += e;
  return total / static_cast<double>(data.size());
}

double dictionary_variance(const Codebook& codebook, std::size_t m) {
  const std::size_t d = codebook.dim();
  const std::size_t k = codebook.k_count();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const auto c = codebook.codeword(m, i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += c[j];
  }
  for (double& v : mean) v /= static_cast<double>(k);
  double var = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto c = codebook.codeword(m, i);
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = c[j] - mean[j];
      var += diff * diff;
    }
  }
  return var / static_cast<double>(k);
}

ReorderResult reorder_by_variance(const Codebook& codebook) {
  const std::size_t m_count = codebook.m_count();
  std::vector<double> variances(m_count);
  for (std::size_t m = 0; m < m_count; ++m) variances[m] = dictionary_variance(codebook, m);
  std::vector<std::uint32_t> perm(m_count);
  std::iota(perm.begin(), perm.end(), 0u);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return variances[a] > variances[b]; });

  const std::size_t block = codebook.k_count() * codebook.dim();
  std::vector<float> values(codebook.codewords().size());
  std::vector<std::uint32_t> order(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    const auto src = codebook.dictionary(perm[m]);
    std::copy(src.begin(), src.end(), values.begin() + static_cast<std::ptrdiff_t>(m * block));
    order[m] = codebook.order()[perm[m]];
  }
  return {Codebook(codebook.dim(), m_count, codebook.k_count(), std::move(values), std::move(order)),
          std::move(perm)};
}

EncodedDataset permute_codes(const EncodedDataset& codes, std::span<const std::uint32_t> permutation) {
  if (permutation.size() != codes.m_count()) throw InputError("permute_codes: size mismatch");
  EncodedDataset out(codes.size(), codes.m_count(), codes.k_count());
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const auto src = codes.row(i);
    auto dst = out.row(i);
    for (std::size_t m = 0; m < permutation.size(); ++m) dst[m] = src[permutation[m]];
  }
  out.set_id_map(codes.id_map());
  return out;
}

}  // namespace annealvq
