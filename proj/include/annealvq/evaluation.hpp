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
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "annealvq/adc.hpp"
#include "annealvq/atree.hpp"
#include "annealvq/codebook.hpp"
#include "annealvq/vector_set.hpp"

namespace annealvq {

struct ExhaustiveIndex {
  const AdcScanner* scanner = nullptr;
};

struct TreeIndex {
  const ATree* tree = nullptr;
  const Codebook* codebook = nullptr;
  SearchParams params;
};

using SearchIndex = std::variant<ExhaustiveIndex, TreeIndex>;

struct EvalReport {
  std::string method;
  std::size_t results = 0;                // R
  std::map<std::size_t, double> recall;   // r -> recall@r for r in {1, 10, 100, R}, r ≤ R
  double mean_latency_ms = 0.0;
  double median_latency_ms = 0.0;
  std::optional<double> distortion;
  double mean_nodes_visited = 0.0;        // tree only
  std::size_t max_nodes_visited = 0;
  std::map<std::string, std::string> parameters;
};

/// Runs every query through the index and scores recall@r as the fraction of
/// queries whose true nearest neighbour is among the first r results.
/// Latency is wall clock per query. Distortion is filled in when `base`
/// matches the size of the encoded data behind the index.
EvalReport evaluate(const SearchIndex& index, const VectorSet& base, const VectorSet& queries,
                    const GroundTruth& ground_truth, std::size_t results,
                    const EncodedDataset* encoded = nullptr);

}  // namespace annealvq
