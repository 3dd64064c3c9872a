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

#include "annealvq/adc.hpp"

#include <algorithm>
#include <string>

#include "annealvq/errors.hpp"
#include "distance_kernels.hpp"

namespace annealvq {

AdcTable adc_table(const Codebook& codebook, std::span<const float> q) {
  if (q.size() != codebook.dim()) {
    throw InputError("adc_table: query dimension " + std::to_string(q.size()) +
                     " differs from codebook dimension " + std::to_string(codebook.dim()));
  }
  AdcTable table(codebook.m_count(), codebook.k_count(),
                 detail::squared_norm(q.data(), q.size()));
  for (std::size_t m = 0; m < codebook.m_count(); ++m) {
    for (std::size_t k = 0; k < codebook.k_count(); ++k) {
      table.at(m, k) = detail::squared_l2(q.data(), codebook.codeword(m, k).data(), q.size());
    }
  }
  return table;
}

double adc_distance(const AdcTable& table, const CrossProductTable& cross,
                    std::span<const Code> code) {
  const double q_norm = table.query_norm_sq();
  double dist = q_norm;
  for (std::size_t m = 0; m < code.size(); ++m) {
    dist = extend_distance(dist, table(m, code[m]), q_norm, prefix_epsilon(cross, code, m));
  }
  return dist;
}

AdcScanner::AdcScanner(const Codebook& codebook, const CrossProductTable& cross,
                       const EncodedDataset& encoded)
    : codebook_(codebook), encoded_(encoded) {
  if (encoded.m_count() != codebook.m_count() || encoded.k_count() != codebook.k_count()) {
    throw InputError("AdcScanner: encoded data shape does not match the codebook");
  }
  if (cross.fingerprint() != codebook.fingerprint()) {
    throw InputError("AdcScanner: cross-product table was built for another codebook");
  }
  const std::size_t m_count = codebook.m_count();
  epsilons_.resize(encoded.size() * m_count);
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    const auto code = encoded.row(i);
    for (std::size_t m = 0; m < m_count; ++m) {
      epsilons_[i * m_count + m] = prefix_epsilon(cross, code, m);
    }
  }
}

std::vector<Neighbor> AdcScanner::search(std::span<const float> q, std::size_t r) const {
  const std::size_t n = encoded_.size();
  if (r > n) {
    throw InputError("exhaustive search: r = " + std::to_string(r) + " exceeds n = " +
                     std::to_string(n));
  }
  if (r == 0) return {};
  const AdcTable table = adc_table(codebook_, q);
  const double q_norm = table.query_norm_sq();
  const std::size_t m_count = codebook_.m_count();
  const std::size_t k_count = codebook_.k_count();
  // table − ‖q‖² once per query: the same double subtraction the tree does per
  // node, so both give bit-identical distances.
  std::vector<double> shifted(m_count * k_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t k = 0; k < k_count; ++k) shifted[m * k_count + k] = table(m, k) - q_norm;
  }
  const Code* codes = encoded_.codes().data();
  const float* eps = epsilons_.data();

  // Bounded max-heap on `closer`; front() is the worst of the best r so far.
  std::vector<Neighbor> best;
  best.reserve(r);
  for (std::size_t i = 0; i < n; ++i) {
    const Code* row = codes + i * m_count;
    const float* row_eps = eps + i * m_count;
    double dist = q_norm;
    for (std::size_t m = 0; m < m_count; ++m) {
      dist = dist + shifted[m * k_count + row[m]] + 2.0 * static_cast<double>(row_eps[m]);
    }
    const Neighbor cand{encoded_.id(i), dist};
    if (best.size() < r) {
      best.push_back(cand);
      std::push_heap(best.begin(), best.end(), closer);
    } else if (closer(cand, best.front())) {
      std::pop_heap(best.begin(), best.end(), closer);
      best.back() = cand;
      std::push_heap(best.begin(), best.end(), closer);
    }
  }
  std::sort_heap(best.begin(), best.end(), closer);
  return best;
}

std::vector<Neighbor> exhaustive_adc_search(const Codebook& codebook,
                                            const EncodedDataset& encoded,
                                            std::span<const float> q, std::size_t r) {
  const CrossProductTable cross(codebook);
  return AdcScanner(codebook, cross, encoded).search(q, r);
}

}  // namespace annealvq
