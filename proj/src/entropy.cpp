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

#include "annealvq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "annealvq/errors.hpp"
#include "annealvq/rng.hpp"

namespace annealvq {
namespace {

// G(n) from the bias-corrected estimator: ψ(n) + ½(−1)ⁿ(ψ((n+1)/2) − ψ(n/2)).
double grassberger_g(std::uint64_t n) {
  using boost::math::digamma;
  const double x = static_cast<double>(n);
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return digamma(x) + 0.5 * sign * (digamma((x + 1.0) / 2.0) - digamma(x / 2.0));
}

// Entropy of the run lengths of a sorted key sequence.
double entropy_of_sorted(std::span<const std::uint64_t> keys, EntropyEstimator estimator) {
  std::vector<std::uint64_t> counts;
  for (std::size_t i = 0; i < keys.size();) {
    std::size_t j = i + 1;
    while (j < keys.size() && keys[j] == keys[i]) ++j;
    counts.push_back(j - i);
    i = j;
  }
  return entropy_bits(std::move(counts), estimator);
}

std::vector<std::uint64_t> column_keys(const EncodedDataset& encoded,
                                       std::span<const std::uint64_t> rows, std::size_t a) {
  std::vector<std::uint64_t> keys(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) keys[i] = encoded.row(rows[i])[a];
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

double entropy_bits(std::vector<std::uint64_t> counts, EntropyEstimator estimator) {
  std::erase(counts, std::uint64_t{0});
  if (counts.empty()) return 0.0;
  // Summing over the sorted multiset makes the result a function of the
  // counts alone, independent of how the histogram was laid out.
  std::sort(counts.begin(), counts.end());
  double total = 0.0;
  for (std::uint64_t c : counts) total += static_cast<double>(c);
  double acc = 0.0;
  for (std::uint64_t c : counts) {
    const double x = static_cast<double>(c);
    acc += x * (estimator == EntropyEstimator::kPlugIn ? std::log(x) : grassberger_g(c));
  }
  const double nats = std::log(total) - acc / total;
  return std::max(0.0, nats / std::numbers::ln2);
}

MiMatrix mi_matrix_of_rows(const EncodedDataset& encoded, std::span<const std::uint64_t> rows,
                           EntropyEstimator estimator) {
  const std::size_t m_count = encoded.m_count();
  const std::size_t k_count = encoded.k_count();
  for (std::uint64_t r : rows) {
    if (r >= encoded.size()) throw InputError("mi: row " + std::to_string(r) + " out of range");
  }
  MiMatrix mi;
  mi.m_count = m_count;
  mi.samples = rows.size();
  mi.values.assign(m_count * m_count, 0.0);
  if (rows.empty()) return mi;

  const double ceiling = std::log2(static_cast<double>(k_count));
  std::vector<double> raw(m_count);
  std::vector<double> clamped(m_count);
  for (std::size_t a = 0; a < m_count; ++a) {
    raw[a] = entropy_of_sorted(column_keys(encoded, rows, a), estimator);
    clamped[a] = std::min(raw[a], ceiling);
    mi.values[a * m_count + a] = clamped[a];
  }
  std::vector<std::uint64_t> joint(rows.size());
  for (std::size_t a = 0; a < m_count; ++a) {
    for (std::size_t b = a + 1; b < m_count; ++b) {
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto code = encoded.row(rows[i]);
        joint[i] = static_cast<std::uint64_t>(code[a]) * k_count + code[b];
      }
      std::sort(joint.begin(), joint.end());
      const double h_ab = entropy_of_sorted(joint, estimator);
      const double value =
          std::clamp(raw[a] + raw[b] - h_ab, 0.0, std::min(clamped[a], clamped[b]));
      mi.values[a * m_count + b] = value;
      mi.values[b * m_count + a] = value;
    }
  }
  return mi;
}

MiMatrix mi_matrix(const EncodedDataset& encoded, const MiOptions& options) {
  if (encoded.size() < 2) throw InputError("mi: need at least 2 encoded vectors");
  if (options.sample_cap == 0) throw InputError("mi: sample cap must be at least 1");
  std::vector<std::uint64_t> all(encoded.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  if (all.size() <= options.sample_cap) return mi_matrix_of_rows(encoded, all, options.estimator);
  std::vector<std::uint64_t> rows;
  rows.reserve(options.sample_cap);
  std::mt19937_64 rng(derive_seed(options.seed, "mi-sample"));
  std::sample(all.begin(), all.end(), std::back_inserter(rows), options.sample_cap, rng);
  return mi_matrix_of_rows(encoded, rows, options.estimator);
}

LocalityProfile locality_profile(const EncodedDataset& encoded, const GroundTruth& ground_truth,
                                 std::size_t neighborhood_k, EntropyEstimator estimator) {
  if (neighborhood_k == 0) throw InputError("locality: neighbourhood size must be at least 1");
  if (neighborhood_k > ground_truth.depth) {
    throw InputError("locality: neighbourhood size " + std::to_string(neighborhood_k) +
                     " exceeds ground-truth depth " + std::to_string(ground_truth.depth));
  }
  const bool has_anchors = !ground_truth.anchor_ids.empty();
  if (has_anchors && ground_truth.anchor_ids.size() != ground_truth.queries) {
    throw InputError("locality: anchor list does not match the ground-truth rows");
  }

  // Pool each anchor's nearest neighbours, skipping the anchor itself.
  std::vector<std::uint64_t> population;
  for (std::size_t q = 0; q < ground_truth.queries; ++q) {
    std::size_t taken = 0;
    for (std::uint64_t id : ground_truth.row(q)) {
      if (taken == neighborhood_k) break;
      if (has_anchors && id == ground_truth.anchor_ids[q]) continue;
      if (id >= encoded.size()) {
        throw InputError("locality: neighbour id " + std::to_string(id) + " is not in the encoded set");
      }
      population.push_back(id);
      ++taken;
    }
  }

  const std::size_t m_count = encoded.m_count();
  LocalityProfile profile;
  profile.population = population.size();
  std::vector<std::uint64_t> prefix(population.size(), 0);
  std::vector<std::uint64_t> keys;
  double previous = 0.0;
  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t i = 0; i < population.size(); ++i) {
      prefix[i] = splitmix64(prefix[i] * 0x100000001b3ULL + encoded.row(population[i])[m] + 1);
    }
    keys = prefix;
    std::sort(keys.begin(), keys.end());
    // A refinement of a partition cannot lose entropy; hold that exactly.
    const double h = std::max(previous, entropy_of_sorted(keys, estimator));
    profile.prefix_entropy.push_back(h);
    profile.conditional_entropy.push_back(h - previous);
    previous = h;
  }
  profile.local_mi = mi_matrix_of_rows(encoded, population, estimator);
  return profile;
}

}  // namespace annealvq
