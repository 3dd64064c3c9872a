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

#include "annealvq/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <string>

#include "annealvq/errors.hpp"

namespace annealvq {
namespace {

std::string join_budgets(const std::vector<std::size_t>& budgets) {
  std::string out;
  for (std::size_t b : budgets) {
    if (!out.empty()) out += ';';
    out += b == kUnbounded ? std::string("inf") : std::to_string(b);
  }
  return out;
}

}  // namespace

EvalReport evaluate(const SearchIndex& index, const VectorSet& base, const VectorSet& queries,
                    const GroundTruth& ground_truth, std::size_t results,
                    const EncodedDataset* encoded) {
  if (results == 0) throw InputError("evaluate: R must be at least 1");
  if (ground_truth.depth == 0 || ground_truth.queries != queries.size()) {
    throw InputError("evaluate: ground truth covers " + std::to_string(ground_truth.queries) +
                     " queries, expected " + std::to_string(queries.size()));
  }

  EvalReport report;
  report.results = results;
  const Codebook* codebook = nullptr;
  if (const auto* ex = std::get_if<ExhaustiveIndex>(&index)) {
    if (!ex->scanner) throw InputError("evaluate: missing exhaustive index");
    report.method = "exhaustive";
    codebook = &ex->scanner->codebook();
  } else {
    const auto& tree = std::get<TreeIndex>(index);
    if (!tree.tree || !tree.codebook) throw InputError("evaluate: missing tree index");
    report.method = "atree";
    codebook = tree.codebook;
    report.parameters["budgets"] = join_budgets(tree.params.budgets);
  }
  report.parameters["R"] = std::to_string(results);
  report.parameters["queries"] = std::to_string(queries.size());

  std::vector<std::size_t> cutoffs;
  for (std::size_t r : {std::size_t{1}, std::size_t{10}, std::size_t{100}, results}) {
    if (r <= results && std::find(cutoffs.begin(), cutoffs.end(), r) == cutoffs.end()) {
      cutoffs.push_back(r);
    }
  }
  std::vector<std::size_t> hits(cutoffs.size(), 0);
  std::vector<double> latencies;
  latencies.reserve(queries.size());
  double node_total = 0.0;

  for (std::size_t q = 0; q < queries.size(); ++q) {
    std::vector<Neighbor> found;
    const auto start = std::chrono::steady_clock::now();
    if (const auto* ex = std::get_if<ExhaustiveIndex>(&index)) {
      found = ex->scanner->search(queries.row(q), std::min(results, ex->scanner->encoded().size()));
    } else {
      const auto& tree = std::get<TreeIndex>(index);
      SearchParams params = tree.params;
      params.results = results;
      SearchResult r = atree_search(*tree.tree, *tree.codebook, queries.row(q), params);
      found = std::move(r.neighbors);
      node_total += static_cast<double>(r.stats.nodes_visited);
      report.max_nodes_visited = std::max(report.max_nodes_visited, r.stats.nodes_visited);
    }
    latencies.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());

    const std::uint64_t truth = ground_truth.row(q)[0];
    const auto it = std::find_if(found.begin(), found.end(),
                                 [truth](const Neighbor& n) { return n.id == truth; });
    const auto rank = static_cast<std::size_t>(it - found.begin());
    for (std::size_t c = 0; c < cutoffs.size(); ++c) {
      if (it != found.end() && rank < cutoffs[c]) ++hits[c];
    }
  }

  const double nq = static_cast<double>(queries.size());
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    report.recall[cutoffs[c]] = nq == 0 ? 0.0 : static_cast<double>(hits[c]) / nq;
  }
  if (!latencies.empty()) {
    double sum = 0.0;
    for (double l : latencies) sum += l;
    report.mean_latency_ms = sum / nq;
    std::vector<double> sorted = latencies;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    report.median_latency_ms =
        sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    report.mean_nodes_visited = node_total / nq;
  }
  if (encoded && !base.empty()) report.distortion = distortion(*codebook, base, *encoded);
  return report;
}

}  // namespace annealvq
