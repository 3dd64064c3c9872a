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

#include "annealvq/encoding.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "annealvq/errors.hpp"
#include "annealvq/op_counters.hpp"
#include "annealvq/parallel.hpp"
#include "distance_kernels.hpp"

namespace annealvq {

MultipathEncoder::MultipathEncoder(const Codebook& codebook, const CrossProductTable& cross)
    : codebook_(codebook), cross_(cross), distances_(codebook.k_count()),
      cross_sums_(codebook.k_count()), reconstruction_(codebook.dim()) {
  if (cross.fingerprint() != codebook.fingerprint()) {
    throw InputError("MultipathEncoder: cross-product table was built for another codebook");
  }
}

bool MultipathEncoder::precedes(const Candidate& a, const Candidate& b) const noexcept {
  if (a.score != b.score) return a.score < b.score;
  const std::size_t m_count = codebook_.m_count();
  const Code* pa = beam_codes_.data() + a.parent * m_count;
  const Code* pb = beam_codes_.data() + b.parent * m_count;
  // Beam prefixes are zero-filled past the current stage, so comparing the
  // full rows compares the prefixes.
  for (std::size_t j = 0; j < m_count; ++j) {
    if (pa[j] != pb[j]) return pa[j] < pb[j];
  }
  return a.k < b.k;
}

double MultipathEncoder::encode(std::span<const float> x, std::size_t beam_width,
                                std::span<Code> code) {
  const std::size_t m_count = codebook_.m_count();
  const std::size_t k_count = codebook_.k_count();
  const std::size_t d = codebook_.dim();
  if (x.size() != d) {
    throw InputError("encode: vector dimension " + std::to_string(x.size()) +
                     " differs from codebook dimension " + std::to_string(d));
  }
  if (code.size() != m_count) throw InputError("encode: code buffer has the wrong length");
  if (beam_width == 0) throw InputError("encode: beam width must be at least 1");

  const double x_norm = detail::squared_norm(x.data(), d);
  const std::size_t cap = std::min(beam_width, std::numeric_limits<std::size_t>::max() / k_count);
  beam_codes_.assign(m_count, 0);
  beam_errors_.assign(1, x_norm);
  std::size_t live = 1;

  for (std::size_t m = 0; m < m_count; ++m) {
    for (std::size_t k = 0; k < k_count; ++k) {
      distances_[k] = detail::squared_l2(x.data(), codebook_.codeword(m, k).data(), d);
    }
    ANNEALVQ_COUNT(codeword_distance_evals, k_count);

    candidates_.clear();
    for (std::size_t l = 0; l < live; ++l) {
      const Code* prefix = beam_codes_.data() + l * m_count;
      std::fill(cross_sums_.begin(), cross_sums_.end(), 0.0);
      for (std::size_t j = 0; j < m; ++j) {
        const auto row = cross_.row(j, prefix[j], m);
        for (std::size_t k = 0; k < k_count; ++k) cross_sums_[k] += row[k];
      }
      const double err = beam_errors_[l];
      for (std::size_t k = 0; k < k_count; ++k) {
        candidates_.push_back({err + (distances_[k] - x_norm) + 2.0 * cross_sums_[k],
                               static_cast<std::uint32_t>(l), static_cast<Code>(k)});
      }
    }
    ANNEALVQ_COUNT(beam_scored_candidates, candidates_.size());

    const std::size_t keep = std::min(cap, candidates_.size());
    auto cmp = [this](const Candidate& a, const Candidate& b) { return precedes(a, b); };
    if (keep < candidates_.size()) {
      std::nth_element(candidates_.begin(), candidates_.begin() + static_cast<std::ptrdiff_t>(keep),
                       candidates_.end(), cmp);
    }
    std::sort(candidates_.begin(), candidates_.begin() + static_cast<std::ptrdiff_t>(keep), cmp);

    next_codes_.assign(keep * m_count, 0);
    beam_errors_.resize(keep);
    for (std::size_t t = 0; t < keep; ++t) {
      const Candidate& c = candidates_[t];
      const Code* parent = beam_codes_.data() + c.parent * m_count;
      Code* dst = next_codes_.data() + t * m_count;
      std::copy(parent, parent + m, dst);
      dst[m] = c.k;
      beam_errors_[t] = c.score;
    }
    beam_codes_.swap(next_codes_);
    live = keep;
  }

  // Rank the surviving full codes by their exact error.
  std::size_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < live; ++l) {
    const std::span<const Code> candidate(beam_codes_.data() + l * m_count, m_count);
    reconstruct_into(codebook_, candidate, reconstruction_);
    double err = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = static_cast<double>(x[j]) - reconstruction_[j];
      err += diff * diff;
    }
    const bool better =
        err < best_err ||
        (err == best_err && std::lexicographical_compare(
                                candidate.begin(), candidate.end(),
                                beam_codes_.begin() + static_cast<std::ptrdiff_t>(best * m_count),
                                beam_codes_.begin() + static_cast<std::ptrdiff_t>((best + 1) * m_count)));
    if (better) {
      best = l;
      best_err = err;
    }
  }
  std::copy_n(beam_codes_.begin() + static_cast<std::ptrdiff_t>(best * m_count), m_count,
              code.begin());
  return best_err;
}

EncodeResult encode_multipath(const Codebook& codebook, const CrossProductTable& cross,
                              std::span<const float> x, std::size_t beam_width) {
  MultipathEncoder encoder(codebook, cross);
  EncodeResult result;
  result.code.resize(codebook.m_count());
  result.error = encoder.encode(x, beam_width, result.code);
  return result;
}

EncodedDataset encode_dataset(const Codebook& codebook, const CrossProductTable& cross,
                              const VectorSet& data, std::size_t beam_width, std::size_t threads) {
  if (!data.empty() && data.dim() != codebook.dim()) {
    throw InputError("encode_dataset: data dimension " + std::to_string(data.dim()) +
                     " differs from codebook dimension " + std::to_string(codebook.dim()));
  }
  EncodedDataset out(data.size(), codebook.m_count(), codebook.k_count());
  parallel_for(data.size(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
    MultipathEncoder encoder(codebook, cross);
    for (std::size_t i = begin; i < end; ++i) encoder.encode(data.row(i), beam_width, out.row(i));
  });
  out.set_codebook_fingerprint(codebook.fingerprint());
  return out;
}

EncodedDataset encode_dataset(const Codebook& codebook, const VectorSet& data,
                              std::size_t beam_width, std::size_t threads) {
  const CrossProductTable cross(codebook);
  return encode_dataset(codebook, cross, data, beam_width, threads);
}

}  // namespace annealvq
