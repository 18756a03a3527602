#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "treebandit/types.hpp"

namespace treebandit {

struct ItemEmbedding {
  ItemId item_id = 0;
  Vec vector;
};

struct TreeNode {
  NodeId node_id = 0;
  int level = 0;  // 0 = root, depth() = leaves
  std::optional<NodeId> parent_id;
  std::vector<NodeId> children_ids;
  std::vector<ItemId> item_ids;  // non-empty only on leaves
  Vec feature;                   // leaf: mean of item vectors; inner: mean of child features

  bool is_leaf() const { return children_ids.empty(); }
};

// Immutable L-level partition of the item set. Node ids are dense 0..n-1 with
// the root at 0, assigned level by level. Leaf item sets are pairwise disjoint
// and jointly cover the item universe the tree was built from. item_closure()
// returns the union of item ids below a node (the node's own item set), sorted;
// closures are precomputed so concurrent readers never race on a cache.
class HierarchyTree {
public:
  HierarchyTree() = default;

  // Assembles a tree from parts (used by the builders and the deserializer),
  // computes closures, and validates structural invariants.
  HierarchyTree(std::vector<int> level_sizes, int dimension, std::vector<TreeNode> nodes);

  const TreeNode& node(NodeId id) const;
  const TreeNode& root() const { return node(0); }
  int depth() const { return static_cast<int>(level_sizes_.size()) - 1; }  // L
  int dimension() const { return dimension_; }
  const std::vector<int>& level_sizes() const { return level_sizes_; }
  const std::vector<NodeId>& level_nodes(int level) const;
  const std::vector<ItemId>& item_closure(NodeId id) const;
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t item_count() const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }

private:
  void finalize();  // closures + invariant checks; throws InternalError

  std::vector<int> level_sizes_;
  int dimension_ = 0;
  std::vector<TreeNode> nodes_;                  // indexed by node_id
  std::vector<std::vector<NodeId>> by_level_;    // level -> node ids
  std::vector<std::vector<ItemId>> closures_;    // node_id -> sorted item ids below
};

// Bottom-up construction: K-Means the item vectors into level_sizes.back()
// leaves, then cluster node features upward level by level. level_sizes runs
// root to leaves, {1, k_1, ..., k_L}, strictly increasing, k_L <= |items|.
HierarchyTree build_tree(const std::vector<ItemEmbedding>& items,
                         const std::vector<int>& level_sizes, int max_iter, std::uint64_t seed);

// Flat 1-level grouping for category baselines: one leaf per distinct label,
// ordered lexicographically. Every item must be labelled.
HierarchyTree build_category_grouping(const std::vector<ItemEmbedding>& items,
                                      const std::map<ItemId, std::string>& labels);

}  // namespace treebandit
