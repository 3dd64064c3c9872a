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

#include "annealvq/atree_io.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "annealvq/errors.hpp"
#include "binary_io.hpp"

namespace annealvq {
namespace {

constexpr std::string_view kTreeMagic = "HCLT";

void write_node(detail::BinaryWriter& out, const ATree& tree, const ATreeNode& node) {
  out.put(node.code);
  out.put(node.epsilon);
  out.put(node.child_count);
  if (node.is_leaf()) {
    for (const SuffixStep& step : tree.suffix(node)) {
      out.put(step.code);
      out.put(step.epsilon);
    }
    out.put(static_cast<std::uint64_t>(node.id_count));
    out.put_span(tree.ids(node));
    return;
  }
  for (const ATreeNode& child : tree.children(node)) write_node(out, tree, child);
}

}  // namespace

// Rebuilds the breadth-first layout from a preorder stream.
class ATreeAssembler {
 public:
  ATreeAssembler(detail::BinaryReader& in, std::size_t m_count, std::size_t k_count)
      : in_(in), m_count_(m_count), k_count_(k_count) {}

  ATree run(const Fingerprint& fingerprint, std::uint64_t id_total, std::uint64_t node_total,
            std::uint64_t leaf_total, std::uint64_t internal_total) {
    Temp root;
    root.children.resize(in_.get<std::uint32_t>("root child count"));
    if (node_total == 0) {
      // A default-constructed tree has no root at all.
      in_.expect_end();
      if (!root.children.empty() || id_total || leaf_total || internal_total) {
        throw FormatError(in_.path().string() + ": node or id counts disagree with the header");
      }
      ATree tree;
      tree.m_count_ = m_count_;
      tree.k_count_ = k_count_;
      tree.fingerprint_ = fingerprint;
      tree.index_links();
      return tree;
    }
    temps_.push_back(std::move(root));
    std::vector<std::pair<std::size_t, std::size_t>> stack;  // (temp node, next child slot)
    stack.push_back({0, 0});
    while (!stack.empty()) {
      auto& [index, slot] = stack.back();
      if (slot == temps_[index].children.size()) {
        stack.pop_back();
        continue;
      }
      const std::size_t parent = index;
      const std::size_t child_slot = slot++;
      const std::size_t child = read_node(temps_[parent].depth + 1);
      temps_[parent].children[child_slot] = child;
      if (!temps_[child].children.empty()) stack.push_back({child, 0});
      if (temps_.size() > node_total) {
        throw FormatError(in_.path().string() + ": more nodes than the header declares");
      }
    }
    in_.expect_end();

    ATree tree;
    tree.m_count_ = m_count_;
    tree.k_count_ = k_count_;
    tree.fingerprint_ = fingerprint;
    std::deque<std::pair<std::size_t, std::size_t>> queue;  // (temp node, final index)
    tree.nodes_.resize(1);
    queue.push_back({0, 0});
    while (!queue.empty()) {
      const auto [t, at] = queue.front();
      queue.pop_front();
      Temp& temp = temps_[t];
      ATreeNode node;
      node.code = temp.code;
      node.depth = static_cast<std::uint16_t>(temp.depth);
      node.epsilon = temp.epsilon;
      if (!temp.ids.empty()) {
        node.suffix_begin = tree.suffix_.size();
        tree.suffix_.insert(tree.suffix_.end(), temp.suffix.begin(), temp.suffix.end());
        node.id_begin = tree.ids_.size();
        node.id_count = temp.ids.size();
        tree.ids_.insert(tree.ids_.end(), temp.ids.begin(), temp.ids.end());
        ++tree.leaf_count_;
      } else {
        node.child_begin = temp.children.empty() ? 0 : tree.nodes_.size();
        node.child_count = static_cast<std::uint32_t>(temp.children.size());
        if (t != 0) ++tree.internal_count_;
        for (std::size_t c : temp.children) {
          queue.push_back({c, tree.nodes_.size()});
          tree.nodes_.emplace_back();
        }
      }
      tree.nodes_[at] = node;
    }

    if (tree.ids_.size() != id_total || tree.nodes_.size() != node_total ||
        tree.leaf_count_ != leaf_total || tree.internal_count_ != internal_total) {
      throw FormatError(in_.path().string() + ": node or id counts disagree with the header");
    }
    std::vector<std::uint64_t> sorted = tree.ids_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw FormatError(in_.path().string() + ": duplicate vector id");
    }
    tree.index_links();
    return tree;
  }

 private:
  struct Temp {
    Code code = 0;
    std::size_t depth = 0;
    float epsilon = 0.0f;
    std::vector<std::size_t> children;
    std::vector<SuffixStep> suffix;
    std::vector<std::uint64_t> ids;
  };

  Code read_code(std::string_view what) {
    const std::size_t at = in_.offset();
    const auto code = in_.get<Code>(what);
    if (code >= k_count_) {
      throw FormatError(in_.path().string() + ": code " + std::to_string(code) +
                        " out of range at byte offset " + std::to_string(at));
    }
    return code;
  }

  std::size_t read_node(std::size_t depth) {
    if (depth > m_count_) {
      throw FormatError(in_.path().string() + ": tree deeper than M at byte offset " +
                        std::to_string(in_.offset()));
    }
    Temp node;
    node.depth = depth;
    node.code = read_code("node code");
    node.epsilon = in_.get<float>("node epsilon");
    const auto child_count = in_.get<std::uint32_t>("child count");
    if (child_count == 0) {
      for (std::size_t m = depth; m < m_count_; ++m) {
        const Code code = read_code("suffix code");
        node.suffix.push_back({code, in_.get<float>("suffix epsilon")});
      }
      const auto id_count = in_.get<std::uint64_t>("id count");
      if (id_count == 0) {
        throw FormatError(in_.path().string() + ": leaf without ids at byte offset " +
                          std::to_string(in_.offset()));
      }
      in_.require(id_count > in_.remaining() / 8 ? in_.remaining() + 1 : id_count * 8, "leaf ids");
      node.ids.resize(id_count);
      in_.get_span(std::span<std::uint64_t>(node.ids), "leaf ids");
    } else {
      if (depth == m_count_) {
        throw FormatError(in_.path().string() + ": node at depth M has children");
      }
      node.children.resize(child_count);
    }
    temps_.push_back(std::move(node));
    return temps_.size() - 1;
  }

  detail::BinaryReader& in_;
  std::size_t m_count_;
  std::size_t k_count_;
  std::vector<Temp> temps_;
};

void serialize_atree(const ATree& tree, const std::filesystem::path& path) {
  detail::BinaryWriter out(path);
  out.put_bytes(kTreeMagic);
  out.put<std::uint32_t>(kTreeFormatVersion);
  const Fingerprint& f = tree.codebook_fingerprint();
  out.put_span(std::span<const std::uint8_t>(f));
  out.put(static_cast<std::uint32_t>(tree.m_count()));
  out.put(static_cast<std::uint32_t>(tree.k_count()));
  out.put(static_cast<std::uint64_t>(tree.id_count()));
  out.put(static_cast<std::uint64_t>(tree.node_count()));
  out.put(static_cast<std::uint64_t>(tree.leaf_count()));
  out.put(static_cast<std::uint64_t>(tree.internal_count()));
  if (tree.node_count() == 0) {
    out.put<std::uint32_t>(0);
  } else {
    out.put(tree.root().child_count);
    for (const ATreeNode& child : tree.children(tree.root())) write_node(out, tree, child);
  }
  out.close();
}

ATree deserialize_atree(const std::filesystem::path& path) {
  detail::BinaryReader in(path);
  in.expect_magic(kTreeMagic);
  const auto version = in.get<std::uint32_t>("format version");
  if (version != kTreeFormatVersion) {
    throw InputError(path.string() + ": unsupported format version " + std::to_string(version) +
                     " (expected " + std::to_string(kTreeFormatVersion) + ")");
  }
  Fingerprint fingerprint{};
  in.get_span(std::span<std::uint8_t>(fingerprint), "codebook hash");
  const auto m = in.get<std::uint32_t>("dictionary count");
  const auto k = in.get<std::uint32_t>("codeword count");
  if (m == 0 || m > 65535 || k == 0 || k > 65536) {
    throw FormatError(path.string() + ": invalid tree shape M=" + std::to_string(m) +
                      " K=" + std::to_string(k));
  }
  const auto ids = in.get<std::uint64_t>("id count");
  const auto nodes = in.get<std::uint64_t>("node count");
  const auto leaves = in.get<std::uint64_t>("leaf count");
  const auto internal = in.get<std::uint64_t>("internal count");
  return ATreeAssembler(in, m, k).run(fingerprint, ids, nodes, leaves, internal);
}

}  // namespace annealvq
