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
#include "annealvq/cross_products.hpp"
#include "annealvq/vector_set.hpp"

namespace annealvq {

struct EncodeResult {
  std::vector<Code> code;
  double error = 0.0;  // ‖x − reconstruct(code)‖²
};

/// Beam-search (multi-path) encoder over dictionaries in codebook order.
///
/// Each stage builds the K distances ‖x − c_m(k)‖² once and then scores all
/// beam extensions from table lookups:
///   ‖x − a − c‖² = ‖x − a‖² + ‖x − c‖² − ‖x‖² + 2 cᵀa,
/// where cᵀa is accumulated from cross-product rows. Equal scores prefer the
/// lexicographically smaller code. The surviving full codes are finally
/// ranked by their directly recomputed error.
///
/// Holds scratch buffers, so one instance per thread.
class MultipathEncoder {
 public:
  MultipathEncoder(const Codebook& codebook, const CrossProductTable& cross);

  /// Writes the best code found into `code` and returns its squared error.
  double encode(std::span<const float> x, std::size_t beam_width, std::span<Code> code);

 private:
  struct Candidate {
    double score;
    std::uint32_t parent;
    Code k;
  };

  bool precedes(const Candidate& a, const Candidate& b) const noexcept;

  const Codebook& codebook_;
  const CrossProductTable& cross_;
  std::vector<double> distances_;
  std::vector<double> cross_sums_;
  std::vector<Candidate> candidates_;
  std::vector<Code> beam_codes_;
  std::vector<Code> next_codes_;
  std::vector<double> beam_errors_;
  std::vector<double> reconstruction_;
};

EncodeResult encode_multipath(const Codebook& codebook, const CrossProductTable& cross,
                              std::span<const float> x, std::size_t beam_width);

/// Encodes every row independently; identical to sequential encode_multipath
/// calls for any thread count. The result carries the codebook fingerprint.
EncodedDataset encode_dataset(const Codebook& codebook, const CrossProductTable& cross,
                              const VectorSet& data, std::size_t beam_width,
                              std::size_t threads = 1);
EncodedDataset encode_dataset(const Codebook& codebook, const VectorSet& data,
                              std::size_t beam_width, std::size_t threads = 1);

}  // namespace annealvq
