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

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include "annealvq/atree.hpp"
#include "annealvq/atree_io.hpp"
#include "annealvq/encoding.hpp"
#include "annealvq/errors.hpp"
#include "support/oracles.hpp"

using namespace annealvq;
using Catch::Matchers::WithinAbs;

namespace {

struct Fixture {
  Codebook cb;
  CrossProductTable cross;
  EncodedDataset codes;
  Fixture(std::size_t n, std::size_t d, std::size_t m, std::size_t k, std::uint64_t seed)
      : cb(oracle::random_codebook(d, m, k, seed)), cross(cb) {
    // Random codes give a bushy tree with many shared prefixes.
    std::mt19937_64 rng(seed + 1);
    std::vector<Code> raw(n * m);
    for (Code& c : raw) c = static_cast<Code>(rng() % k);
    codes = EncodedDataset(n, m, k, std::move(raw));
    codes.set_codebook_fingerprint(cb.fingerprint());
  }
};

// Walks every root-to-leaf path, yielding the full code of each leaf.
template <class Fn>
void walk(const ATree& tree, const ATreeNode& node, std::vector<Code>& prefix, Fn&& fn) {
  for (const ATreeNode& child : tree.children(node)) {
    prefix.push_back(child.code);
    if (child.is_leaf()) {
      std::vector<Code> full = prefix;
      for (const SuffixStep& s : tree.suffix(child)) full.push_back(s.code);
      fn(child, full);
    } else {
      walk(tree, child, prefix, fn);
    }
    prefix.pop_back();
  }
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("annealvq_atree_" + name);
}

}  // namespace

TEST_CASE("a single vector gives the root and one leaf carrying the whole code") {
  Fixture f(1, 4, 3, 4, 1);
  const ATree tree = build_atree(f.codes, f.cb, f.cross);
  REQUIRE(tree.node_count() == 2);
  CHECK(tree.leaf_count() == 1);
  CHECK(tree.internal_count() == 0);
  const ATreeNode& leaf = tree.children(tree.root())[0];
  CHECK(leaf.depth == 1);
  CHECK(leaf.code == f.codes.row(0)[0]);
  REQUIRE(tree.suffix(leaf).size() == 2);
  CHECK(tree.suffix(leaf)[1].code == f.codes.row(0)[2]);
  const std::vector<float> q(4, 0.5f);
  const SearchResult r = atree_search(tree, f.cb, q, SearchParams::geometric(3, 1, 1, 5));
  REQUIRE(r.neighbors.size() == 1);
  CHECK(r.neighbors[0].id == 0);
}

TEST_CASE("two vectors sharing a first code split one layer down") {
  const Codebook cb = oracle::random_codebook(4, 2, 4, 2);
  EncodedDataset codes(2, 2, 4, {0, 1, 0, 2});
  const ATree tree = build_atree(codes, cb, CrossProductTable(cb));
  CHECK(tree.node_count() == 4);
  CHECK(tree.leaf_count() == 2);
  CHECK(tree.internal_count() == 1);
  const ATreeNode& mid = tree.children(tree.root())[0];
  CHECK(mid.code == 0);
  CHECK_FALSE(mid.is_leaf());
  REQUIRE(tree.children(mid).size() == 2);
  CHECK(tree.children(mid)[0].code == 1);
  CHECK(tree.ids(tree.children(mid)[0])[0] == 0);
  CHECK(tree.ids(tree.children(mid)[1])[0] == 1);
  CHECK(tree.suffix(tree.children(mid)[0]).empty());
}

TEST_CASE("duplicate codes share one leaf") {
  const Codebook cb = oracle::random_codebook(4, 2, 4, 3);
  EncodedDataset codes(3, 2, 4, {3, 1, 0, 0, 3, 1});
  const ATree tree = build_atree(codes, cb, CrossProductTable(cb));
  CHECK(tree.leaf_count() == 2);
  const ATreeNode& dup = tree.children(tree.root())[1];
  REQUIRE(dup.is_leaf());
  CHECK(std::vector<std::uint64_t>(tree.ids(dup).begin(), tree.ids(dup).end()) ==
        std::vector<std::uint64_t>{0, 2});
}

TEST_CASE("structure: every id in exactly one leaf whose path is its code; stored epsilons match") {
  Fixture f(3000, 8, 4, 8, 4);
  const ATree tree = build_atree(f.codes, f.cb, f.cross);
  CHECK(tree.id_count() == 3000);
  CHECK(tree.node_count() == 1 + tree.leaf_count() + tree.internal_count());
  std::map<std::uint64_t, int> seen;
  std::vector<Code> prefix;
  walk(tree, tree.root(), prefix, [&](const ATreeNode& leaf, const std::vector<Code>& full) {
    for (std::uint64_t id : tree.ids(leaf)) {
      ++seen[id];
      CHECK(std::ranges::equal(f.codes.row(id), full));
    }
    for (std::size_t j = leaf.depth; j < 4; ++j)
      CHECK_THAT(tree.suffix(leaf)[j - leaf.depth].epsilon, WithinAbs(oracle::epsilon(f.cb, full, j), 1e-5));
  });
  CHECK(seen.size() == 3000);
  CHECK(std::ranges::all_of(seen, [](const auto& kv) { return kv.second == 1; }));
  // Internal nodes: epsilon against the path so far.
  std::vector<std::pair<const ATreeNode*, std::vector<Code>>> stack{{&tree.root(), {}}};
  while (!stack.empty()) {
    auto [node, path] = stack.back();
    stack.pop_back();
    for (const ATreeNode& c : tree.children(*node)) {
      std::vector<Code> p = path;
      p.push_back(c.code);
      CHECK(c.depth == p.size());
      CHECK_THAT(c.epsilon, WithinAbs(oracle::epsilon(f.cb, p, p.size() - 1), 1e-5));
      if (!c.is_leaf()) stack.push_back({&c, p});
    }
  }
  // Children of a node are ordered by code and distinct.
  for (const ATreeNode& n : tree.nodes()) {
    const auto kids = tree.children(n);
    for (std::size_t i = 1; i < kids.size(); ++i) CHECK(kids[i - 1].code < kids[i].code);
  }
}

TEST_CASE("without pruning the tree returns exactly the exhaustive ADC result") {
  Fixture f(2000, 8, 4, 8, 5);
  const ATree tree = build_atree(f.codes, f.cb, f.cross);
  const AdcScanner scanner(f.cb, f.cross, f.codes);
  const VectorSet queries = oracle::random_vectors(20, 8, 6);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const SearchResult r = atree_search(tree, f.cb, queries.row(q), SearchParams::unbounded(4, 50));
    CHECK(r.neighbors == scanner.search(queries.row(q), 50));
    CHECK(r.stats.nodes_visited == tree.node_count());
    // Brute force against raw reconstructions.
    const std::vector<Neighbor> exact = exhaustive_adc_search(f.cb, f.codes, queries.row(q), 50);
    for (std::size_t i = 0; i < 50; ++i) CHECK_THAT(r.neighbors[i].distance, WithinAbs(exact[i].distance, 1e-4));
  }
}

TEST_CASE("budgets bound the work and widen monotonically") {
  Fixture f(4000, 8, 4, 16, 7);
  const ATree tree = build_atree(f.codes, f.cb, f.cross);
  const VectorSet queries = oracle::random_vectors(10, 8, 8);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    std::size_t prev = 0;
    for (double l0 : {1.0, 2.0, 8.0, 32.0}) {
      const SearchParams p = SearchParams::geometric(4, l0, 2, 10);
      const SearchResult r = atree_search(tree, f.cb, queries.row(q), p);
      CHECK(r.stats.nodes_visited >= prev);
      prev = r.stats.nodes_visited;
      for (std::size_t i = 0; i < r.stats.layer_sizes.size(); ++i) CHECK(r.stats.layer_sizes[i] <= p.budgets[i]);
      CHECK(std::is_sorted(r.neighbors.begin(), r.neighbors.end(), closer));
      CHECK(r.neighbors.size() <= 10);
    }
  }
}

// Reference search: expand every kept candidate, fully sort by
// (distance, code, node), truncate. Written against the public node layout.
std::vector<Neighbor> reference_search(const ATree& tree, const Codebook& cb, std::span<const float> q,
                                       const SearchParams& p) {
  struct Cand {
    double dist;
    Code code;
    std::size_t node;
    std::size_t step;  // suffix position once inside a leaf
  };
  const auto nodes = tree.nodes();
  std::vector<double> table(cb.m_count() * cb.k_count());
  double qn = 0.0;
  for (float v : q) qn += static_cast<double>(v) * v;
  for (std::size_t m = 0; m < cb.m_count(); ++m)
    for (std::size_t k = 0; k < cb.k_count(); ++k) table[m * cb.k_count() + k] = oracle::sq_dist(q, cb.codeword(m, k));
  auto extend = [&](double parent, std::size_t layer, Code code, float eps) {
    return parent + (table[layer * cb.k_count() + code] - qn) + 2.0 * static_cast<double>(eps);
  };
  std::vector<Cand> current{{qn, 0, 0, 0}};
  for (std::size_t layer = 0; layer < tree.m_count(); ++layer) {
    std::vector<Cand> next;
    for (const Cand& c : current) {
      const ATreeNode& n = nodes[c.node];
      if (n.is_leaf()) {
        const SuffixStep& s = tree.suffix(n)[c.step];
        next.push_back({extend(c.dist, layer, s.code, s.epsilon), s.code, c.node, c.step + 1});
        continue;
      }
      for (std::size_t j = 0; j < n.child_count; ++j) {
        const ATreeNode& child = nodes[n.child_begin + j];
        next.push_back({extend(c.dist, layer, child.code, child.epsilon), child.code, n.child_begin + j, 0});
      }
    }
    std::sort(next.begin(), next.end(), [](const Cand& a, const Cand& b) {
      return std::tie(a.dist, a.code, a.node) < std::tie(b.dist, b.code, b.node);
    });
    if (next.size() > p.budgets[layer]) next.resize(p.budgets[layer]);
    current = next;
  }
  std::vector<Neighbor> out;
  for (const Cand& c : current)
    for (auto id : tree.ids(nodes[c.node])) out.push_back({id, c.dist});
  std::sort(out.begin(), out.end(), closer);
  if (out.size() > p.results) out.resize(p.results);
  return out;
}

TEST_CASE("pruned search matches a plain sort-and-truncate reference") {
  Fixture f(6000, 8, 4, 16, 13);
  const ATree tree = build_atree(f.codes, f.cb, f.cross);
  const VectorSet queries = oracle::random_vectors(10, 8, 14);
  for (double l0 : {1.0, 3.0, 8.0, 20.0}) {
    for (double ls : {1.0, 2.0, 4.0}) {
      const SearchParams p = SearchParams::geometric(4, l0, ls, 30);
      for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto got = atree_search(tree, f.cb, queries.row(q), p).neighbors;
        const auto want = reference_search(tree, f.cb, queries.row(q), p);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
          CHECK(got[i].id == want[i].id);
          CHECK_THAT(got[i].distance, WithinAbs(want[i].distance, 1e-9));
        }
      }
    }
  }
}

TEST_CASE("search parameters") {
  const SearchParams p = SearchParams::geometric(3, 2, 2, 7);
  CHECK(p.budgets == std::vector<std::size_t>{4, 8, 16});
  CHECK(p.results == 7);
  CHECK(SearchParams::geometric(2, 3, 1, 1).budgets == std::vector<std::size_t>{3, 3});
  CHECK(SearchParams::geometric(2, std::numeric_limits<double>::infinity(), 2, 1).budgets[0] == kUnbounded);
  CHECK(SearchParams::geometric(2, 1e19, 2, 1).budgets[1] == kUnbounded);
  CHECK_THROWS_AS(SearchParams::geometric(2, 0.5, 2, 1), InputError);
  CHECK_THROWS_AS(SearchParams::geometric(2, 1, 0, 1), InputError);
  CHECK_THROWS_AS(p.validate(4), InputError);
  SearchParams zero = p;
  zero.results = 0;
  CHECK_THROWS_AS(zero.validate(3), InputError);
}

TEST_CASE("node distance examples") {
  AdcTable t(2, 2, 2.0);
  t.at(1, 0) = 3.0;
  CHECK(node_distance(5.0, t, 0, 0.5f, 1, 2.0) == 7.0);
  CHECK(node_distance(5.0, t, 0, 0.0f, 1, 2.0) == 6.0);
}

TEST_CASE("fingerprint checks") {
  Fixture f(50, 4, 2, 4, 9);
  const Codebook other = oracle::random_codebook(4, 2, 4, 10);
  CHECK_THROWS_AS(build_atree(f.codes, other, CrossProductTable(other)), InputError);
  CHECK_THROWS_AS(build_atree(f.codes, f.cb, CrossProductTable(other)), InputError);
  const ATree tree = build_atree(f.codes, f.cb, f.cross);
  const std::vector<float> q(4, 0.0f);
  CHECK_THROWS_AS(atree_search(tree, other, q, SearchParams::unbounded(2, 1)), InputError);
}

TEST_CASE("serialisation round trip") {
  Fixture f(1500, 8, 4, 8, 11);
  const ATree tree = build_atree(f.codes, f.cb, f.cross);
  const auto path = temp_file("rt.hclt");
  serialize_atree(tree, path);
  const ATree back = deserialize_atree(path);
  CHECK(back == tree);
  const VectorSet queries = oracle::random_vectors(5, 8, 12);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    const SearchParams p = SearchParams::geometric(4, 4, 2, 20);
    CHECK(atree_search(back, f.cb, queries.row(q), p).neighbors ==
          atree_search(tree, f.cb, queries.row(q), p).neighbors);
  }
  SECTION("an empty tree") {
    EncodedDataset none(0, 4, 8);
    none.set_codebook_fingerprint(f.cb.fingerprint());
    const ATree empty = build_atree(none, f.cb, f.cross);
    CHECK(empty.node_count() == 1);
    serialize_atree(empty, path);
    CHECK(deserialize_atree(path) == empty);
    CHECK(atree_search(empty, f.cb, queries.row(0), SearchParams::unbounded(4, 3)).neighbors.empty());
  }
  SECTION("truncation is a format error") {
    const auto size = std::filesystem::file_size(path);
    std::filesystem::resize_file(path, size - 5);
    CHECK_THROWS_AS(deserialize_atree(path), FormatError);
  }
  SECTION("bad magic is an input error") {
    std::fstream io(path, std::ios::in | std::ios::out | std::ios::binary);
    io.put('X');
    io.close();
    CHECK_THROWS_AS(deserialize_atree(path), InputError);
  }
  std::filesystem::remove(path);
}
