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

#include "annealvq/atree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "annealvq/errors.hpp"
#include "annealvq/op_counters.hpp"

namespace annealvq {

ATree build_atree(const EncodedDataset& encoded, const Codebook& codebook,
                  const CrossProductTable& cross) {
  const std::size_t m_count = codebook.m_count();
  if (encoded.m_count() != m_count || encoded.k_count() != codebook.k_count()) {
    throw InputError("build_atree: encoded data shape does not match the codebook");
  }
  if (const Fingerprint* f = encoded.codebook_fingerprint(); f && *f != codebook.fingerprint()) {
    throw InputError("build_atree: codes were produced by a different codebook");
  }
  if (cross.fingerprint() != codebook.fingerprint()) {
    throw InputError("build_atree: cross-product table was built for another codebook");
  }
  if (m_count > 65535) throw InputError("build_atree: too many dictionaries");
  encoded.validate();

  const std::size_t n = encoded.size();
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    const auto ca = encoded.row(a);
    const auto cb = encoded.row(b);
    const auto c = std::lexicographical_compare_three_way(ca.begin(), ca.end(), cb.begin(), cb.end());
    if (c != 0) return c < 0;
    return encoded.id(a) < encoded.id(b);
  });

  ATree tree;
  tree.m_count_ = m_count;
  tree.k_count_ = codebook.k_count();
  tree.fingerprint_ = codebook.fingerprint();
  tree.nodes_.emplace_back();
  tree.ids_.reserve(n);
  if (n == 0) {
    tree.index_links();
    return tree;
  }

  struct Pending {
    std::size_t node;
    std::size_t lo, hi;  // range of sorted rows
  };
  std::deque<Pending> queue;
  queue.push_back({0, 0, n});
  while (!queue.empty()) {
    const Pending p = queue.front();
    queue.pop_front();
    const std::size_t depth = tree.nodes_[p.node].depth;
    const auto first = encoded.row(rows[p.lo]);
    const auto last = encoded.row(rows[p.hi - 1]);

    // Leaf: the subtree below holds a single distinct code.
    if (p.node != 0 && std::equal(first.begin(), first.end(), last.begin())) {
      ATreeNode& leaf = tree.nodes_[p.node];
      leaf.suffix_begin = tree.suffix_.size();
      for (std::size_t m = depth; m < m_count; ++m) {
        tree.suffix_.push_back({first[m], prefix_epsilon(cross, first, m)});
      }
      leaf.id_begin = tree.ids_.size();
      leaf.id_count = p.hi - p.lo;
      for (std::size_t r = p.lo; r < p.hi; ++r) tree.ids_.push_back(encoded.id(rows[r]));
      ++tree.leaf_count_;
      continue;
    }
    if (p.node != 0) ++tree.internal_count_;

    const std::size_t child_begin = tree.nodes_.size();
    std::size_t lo = p.lo;
    while (lo < p.hi) {
      const auto code = encoded.row(rows[lo]);
      std::size_t hi = lo + 1;
      while (hi < p.hi && encoded.row(rows[hi])[depth] == code[depth]) ++hi;
      ATreeNode child;
      child.code = code[depth];
      child.depth = static_cast<std::uint16_t>(depth + 1);
      child.epsilon = prefix_epsilon(cross, code, depth);
      queue.push_back({tree.nodes_.size(), lo, hi});
      tree.nodes_.push_back(child);
      lo = hi;
    }
    ATreeNode& parent = tree.nodes_[p.node];
    parent.child_begin = child_begin;
    parent.child_count = static_cast<std::uint32_t>(tree.nodes_.size() - child_begin);
  }
  tree.index_links();
  return tree;
}

void ATree::index_links() {
  links_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ATreeNode& n = nodes_[i];
    SearchLink& l = links_[i];
    l.begin = n.is_leaf() ? n.suffix_begin : n.child_begin;
    l.epsilon = n.epsilon;
    l.child_count = n.is_leaf() ? 0 : n.child_count;
    l.code = n.code;
  }
}

double node_distance(double parent_distance, const AdcTable& table, Code code, float epsilon,
                     std::size_t layer, double query_norm_sq) noexcept {
  ANNEALVQ_COUNT(node_distance_calls, 1);
  ANNEALVQ_COUNT(adc_table_lookups, 1);
  return extend_distance(parent_distance, table(layer, code), query_norm_sq, epsilon);
}

SearchParams SearchParams::geometric(std::size_t m_count, double l0, double ls,
                                     std::size_t results) {
  if (std::isnan(l0) || l0 < 1.0) throw InputError("search: L0 must be at least 1");
  if (std::isnan(ls) || ls <= 0.0) throw InputError("search: Ls must be positive");
  SearchParams params;
  params.results = results;
  double budget = l0;
  for (std::size_t i = 0; i < m_count; ++i) {
    budget *= ls;
    if (!(budget < 1.8e19)) {
      params.budgets.push_back(kUnbounded);
    } else {
      params.budgets.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(budget))));
    }
  }
  return params;
}

SearchParams SearchParams::unbounded(std::size_t m_count, std::size_t results) {
  SearchParams params;
  params.budgets.assign(m_count, kUnbounded);
  params.results = results;
  return params;
}

void SearchParams::validate(std::size_t m_count) const {
  if (budgets.size() != m_count) {
    throw InputError("search: expected " + std::to_string(m_count) + " layer budgets, got " +
                     std::to_string(budgets.size()));
  }
  for (std::size_t b : budgets) {
    if (b == 0) throw InputError("search: layer budgets must be at least 1");
  }
  if (results == 0) throw InputError("search: R must be at least 1");
}

namespace {

// 16 bytes when node indices fit in 32 bits. Expanding a candidate reads its
// own link again (still cached from scoring) for the child block or suffix.
template <class Index>
struct Candidate {
  double dist;
  Index node;          // index into the node array
  Code code;           // code scored at the current layer
  std::uint16_t step;  // next suffix step once inside a leaf
};

// A function object rather than a pointer so the selection loops inline it.
struct CandidateBefore {
  template <class Index>
  bool operator()(const Candidate<Index>& a, const Candidate<Index>& b) const noexcept {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.code != b.code) return a.code < b.code;
    return a.node < b.node;
  }
};

// Candidate buffers reused across queries on the same thread; they only grow.
template <class Index>
struct Workspace {
  using C = Candidate<Index>;
  std::vector<C> current, next, scratch;
  std::vector<Neighbor> found;

  static C* room(std::vector<C>& v, std::size_t n) {
    if (v.size() < n) v.resize(std::max(n, 2 * v.size()));
    return v.data();
  }

  static Workspace& local() {
    thread_local Workspace ws;
    return ws;
  }
};

// Keeps the `budget` best of `list` (same set as a plain nth_element). A
// cutoff estimated from a strided sample drops most losers with a branch-free
// copy first; random distances make nth_element's comparisons unpredictable.
// The survivors may end up in ws.scratch, which is then swapped into `list`.
template <class Index>
std::size_t keep_best(std::vector<Candidate<Index>>& list, std::size_t n, std::size_t budget,
                      Workspace<Index>& ws) {
  if (n <= budget) return n;
  Candidate<Index>* c = list.data();
  if (n > 2 * budget && n >= 512) {
    constexpr std::size_t kSample = 128;
    std::array<double, kSample> sample;
    for (std::size_t i = 0; i < kSample; ++i) sample[i] = c[i * n / kSample].dist;
    std::sort(sample.begin(), sample.end());
    const double want = 1.5 * static_cast<double>(budget) / static_cast<double>(n) * kSample + 4;
    const double cutoff = sample[std::min(kSample - 1, static_cast<std::size_t>(want))];
    Candidate<Index>* out = Workspace<Index>::room(ws.scratch, n);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < n; ++i) {
      out[kept] = c[i];
      kept += c[i].dist <= cutoff ? 1 : 0;
    }
    // Every dropped candidate is beaten by at least `budget` kept ones.
    if (kept >= budget) {
      list.swap(ws.scratch);
      c = out;
      n = kept;
    }
  }
  if (n > budget) {
    std::nth_element(c, c + budget, c + n, CandidateBefore{});
    n = budget;
  }
  return n;
}

template <class Index>
void search_layers(const ATree& tree, const AdcTable& table, const SearchParams& params,
                   SearchResult& result) {
  using C = Candidate<Index>;
  Workspace<Index>& ws = Workspace<Index>::local();
  SearchStats& stats = result.stats;
  const std::size_t m_count = tree.m_count();
  const SearchLink* links = tree.links().data();
  const SuffixStep* steps = tree.suffix_steps().data();
  const double qn = table.query_norm_sq();

  C* current = Workspace<Index>::room(ws.current, 1);
  current[0] = {qn, 0, 0, 0};
  std::size_t current_size = 1;
  stats.nodes_visited = 1;
  stats.layer_sizes.reserve(m_count);

  for (std::size_t layer = 0; layer < m_count; ++layer) {
    C* next = Workspace<Index>::room(ws.next, current_size);
    std::size_t next_size = 0;
    for (std::size_t i = 0; i < current_size; ++i) {
      const C& c = current[i];
      const SearchLink& at = links[c.node];
      if (at.child_count == 0) {
        // Inside a compressed suffix: advance one step, stay on the leaf.
        const SuffixStep& step = steps[at.begin + c.step];
        next[next_size++] = {node_distance(c.dist, table, step.code, step.epsilon, layer, qn), c.node,
                             step.code, static_cast<std::uint16_t>(c.step + 1)};
        continue;
      }
      // Room for the rest of this layer assuming every later parent is a leaf.
      if (ws.next.size() < next_size + at.child_count + (current_size - i)) {
        next = Workspace<Index>::room(ws.next, next_size + at.child_count + (current_size - i));
      }
      for (std::uint32_t j = 0; j < at.child_count; ++j) {
        const SearchLink& child = links[at.begin + j];
        next[next_size++] = {node_distance(c.dist, table, child.code, child.epsilon, layer, qn),
                             static_cast<Index>(at.begin + j), child.code, 0};
      }
      stats.nodes_visited += at.child_count;
    }
    next_size = keep_best(ws.next, next_size, params.budgets[layer], ws);
    stats.layer_sizes.push_back(next_size);
    ws.current.swap(ws.next);
    current = ws.current.data();
    current_size = next_size;
  }

  // Only leaves no farther than the R-th closest leaf can hold one of the R
  // nearest ids; ties at that distance are all kept.
  if (current_size > params.results) {
    const std::size_t r = params.results;
    std::nth_element(current, current + (r - 1), current + current_size, CandidateBefore{});
    const double limit = current[r - 1].dist;
    std::size_t kept = r;
    for (std::size_t i = r; i < current_size; ++i) {
      if (current[i].dist <= limit) current[kept++] = current[i];
    }
    current_size = kept;
  }
  const auto nodes = tree.nodes();
  auto& found = ws.found;
  found.clear();
  for (std::size_t i = 0; i < current_size; ++i) {
    for (std::uint64_t id : tree.ids(nodes[current[i].node])) found.push_back({id, current[i].dist});
  }
  const auto keep = static_cast<std::ptrdiff_t>(std::min(params.results, found.size()));
  std::partial_sort(found.begin(), found.begin() + keep, found.end(), closer);
  result.neighbors.assign(found.begin(), found.begin() + keep);
}

}  // namespace

SearchResult atree_search(const ATree& tree, const Codebook& codebook, std::span<const float> q,
                          const SearchParams& params) {
  if (codebook.fingerprint() != tree.codebook_fingerprint()) {
    throw InputError("search: the tree was built against a different codebook");
  }
  const auto start = std::chrono::steady_clock::now();
  const AdcTable table = adc_table(codebook, q);
  const auto built = std::chrono::steady_clock::now();
  SearchResult result = atree_search(tree, table, params);
  result.stats.table_time = std::chrono::duration_cast<std::chrono::nanoseconds>(built - start);
  return result;
}

SearchResult atree_search(const ATree& tree, const AdcTable& table, const SearchParams& params) {
  const std::size_t m_count = tree.m_count();
  params.validate(m_count);
  if (table.m_count() != m_count || table.k_count() != tree.k_count()) {
    throw InputError("search: distance table shape does not match the tree");
  }
  const auto start = std::chrono::steady_clock::now();
  SearchResult result;
  if (tree.node_count() == 0 || tree.root().child_count == 0) return result;
  if (tree.node_count() <= std::numeric_limits<std::uint32_t>::max()) {
    search_layers<std::uint32_t>(tree, table, params, result);
  } else {
    search_layers<std::uint64_t>(tree, table, params, result);
  }
  result.stats.traversal_time = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::steady_clock::now() - start);
  return result;
}

}  // namespace annealvq
