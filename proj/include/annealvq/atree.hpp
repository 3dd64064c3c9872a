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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "annealvq/adc.hpp"
#include "annealvq/codebook.hpp"
#include "annealvq/cross_products.hpp"

namespace annealvq {

/// One tree node. Nodes are laid out breadth first so the children of a node
/// are contiguous. A leaf at depth m compresses the single remaining path
/// m+1..M into M − m suffix steps and holds every id whose code ends there.
struct ATreeNode {
  Code code = 0;
  std::uint16_t depth = 0;  // 0 for the root
  float epsilon = 0.0f;
  std::uint32_t child_count = 0;
  std::uint64_t child_begin = 0;
  std::uint64_t suffix_begin = 0;  // leaves only
  std::uint64_t id_begin = 0;      // leaves only
  std::uint64_t id_count = 0;      // > 0 exactly for leaves

  bool is_leaf() const noexcept { return id_count > 0; }

  friend bool operator==(const ATreeNode&, const ATreeNode&) = default;
};

// What the search reads per node, packed: half the size of ATreeNode so a
// block of siblings spans fewer cache lines.
struct SearchLink {
  std::uint64_t begin = 0;        // first child, or first suffix step of a leaf
  float epsilon = 0.0f;
  std::uint32_t child_count = 0;  // 0 on leaves
  Code code = 0;
  friend bool operator==(const SearchLink&, const SearchLink&) = default;
};

struct SuffixStep {
  Code code = 0;
  float epsilon = 0.0f;

  friend bool operator==(const SuffixStep&, const SuffixStep&) = default;
};

class ATree {
 public:
  ATree() = default;

  std::size_t m_count() const noexcept { return m_count_; }
  std::size_t k_count() const noexcept { return k_count_; }
  std::size_t id_count() const noexcept { return ids_.size(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t leaf_count() const noexcept { return leaf_count_; }
  std::size_t internal_count() const noexcept { return internal_count_; }
  const Fingerprint& codebook_fingerprint() const noexcept { return fingerprint_; }

  const ATreeNode& root() const noexcept { return nodes_.front(); }
  std::span<const ATreeNode> nodes() const noexcept { return nodes_; }
  std::span<const ATreeNode> children(const ATreeNode& node) const noexcept {
    return {nodes_.data() + node.child_begin, node.child_count};
  }
  std::span<const SuffixStep> suffix(const ATreeNode& leaf) const noexcept {
    return {suffix_.data() + leaf.suffix_begin, m_count_ - leaf.depth};
  }
  std::span<const std::uint64_t> ids(const ATreeNode& leaf) const noexcept {
    return {ids_.data() + leaf.id_begin, leaf.id_count};
  }

  std::span<const SearchLink> links() const noexcept { return links_; }
  std::span<const SuffixStep> suffix_steps() const noexcept { return suffix_; }

  friend bool operator==(const ATree&, const ATree&) = default;

 private:
  friend ATree build_atree(const EncodedDataset&, const Codebook&, const CrossProductTable&);
  friend class ATreeAssembler;

  std::size_t m_count_ = 0;
  std::size_t k_count_ = 0;
  std::size_t leaf_count_ = 0;
  std::size_t internal_count_ = 0;
  Fingerprint fingerprint_{};
  std::vector<ATreeNode> nodes_;
  std::vector<SuffixStep> suffix_;
  std::vector<std::uint64_t> ids_;
  std::vector<SearchLink> links_;  // mirrors nodes_

  void index_links();
};

/// Builds the prefix tree of the codes. Children are ordered by code; a chain
/// is compressed only when it runs to a single distinct full code; duplicate
/// codes share one leaf. Throws InputError when the codes carry a fingerprint
/// of a different codebook or their shape does not match it.
ATree build_atree(const EncodedDataset& encoded, const Codebook& codebook,
                  const CrossProductTable& cross);

/// ‖q − T‖² of a node from its parent's ‖q − T'‖² with one table lookup.
double node_distance(double parent_distance, const AdcTable& table, Code code, float epsilon,
                     std::size_t layer, double query_norm_sq) noexcept;

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

struct SearchParams {
  std::vector<std::size_t> budgets;  // L_1..L_M
  std::size_t results = 100;         // R

  /// L_i = l0 · ls^i for i = 1..M, saturating at kUnbounded.
  static SearchParams geometric(std::size_t m_count, double l0, double ls, std::size_t results);
  static SearchParams unbounded(std::size_t m_count, std::size_t results);

  void validate(std::size_t m_count) const;
};

struct SearchStats {
  std::size_t nodes_visited = 0;               // N', root included
  std::vector<std::size_t> layer_sizes;        // candidates kept per layer
  std::chrono::nanoseconds table_time{0};
  std::chrono::nanoseconds traversal_time{0};
};

struct SearchResult {
  std::vector<Neighbor> neighbors;
  SearchStats stats;
};

/// Layer-by-layer candidate search. Every iteration replaces each candidate
/// by its children (a leaf advances one suffix step instead), scores them
/// with node_distance and keeps the L_i closest (ties: lower code, then
/// earlier node). The R closest resolved ids are returned by (distance, id).
/// Throws InputError when the codebook fingerprint differs from the tree's.
SearchResult atree_search(const ATree& tree, const Codebook& codebook, std::span<const float> q,
                          const SearchParams& params);

/// Same search from a prebuilt table, skipping the fingerprint check.
SearchResult atree_search(const ATree& tree, const AdcTable& table, const SearchParams& params);

}  // namespace annealvq
