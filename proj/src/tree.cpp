#include "treebandit/tree.hpp"

#include <algorithm>

#include "treebandit/errors.hpp"
#include "treebandit/kmeans.hpp"
#include "treebandit/rng.hpp"

namespace treebandit {

HierarchyTree::HierarchyTree(std::vector<int> level_sizes, int dimension,
                             std::vector<TreeNode> nodes)
    : level_sizes_(std::move(level_sizes)), dimension_(dimension), nodes_(std::move(nodes)) {
  finalize();
}

const TreeNode& HierarchyTree::node(NodeId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
    throw InternalError("HierarchyTree: unknown node id " + std::to_string(id));
  return nodes_[id];
}

const std::vector<NodeId>& HierarchyTree::level_nodes(int level) const {
  if (level < 0 || static_cast<std::size_t>(level) >= by_level_.size())
    throw InternalError("HierarchyTree: level out of range");
  return by_level_[level];
}

const std::vector<ItemId>& HierarchyTree::item_closure(NodeId id) const {
  node(id);  // bounds check
  return closures_[id];
}

std::size_t HierarchyTree::item_count() const { return closures_.empty() ? 0 : closures_[0].size(); }

void HierarchyTree::finalize() {
  const int L = depth();
  if (level_sizes_.empty() || level_sizes_[0] != 1 || L < 1)
    throw InternalError("HierarchyTree: level_sizes must start at 1 and have depth >= 1");
  if (dimension_ < 1) throw InternalError("HierarchyTree: dimension must be >= 1");

  by_level_.assign(L + 1, {});
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const TreeNode& nd = nodes_[i];
    if (nd.node_id != static_cast<NodeId>(i))
      throw InternalError("HierarchyTree: node ids must be dense and in order");
    if (nd.level < 0 || nd.level > L) throw InternalError("HierarchyTree: node level out of range");
    if (nd.feature.size() != dimension_)
      throw InternalError("HierarchyTree: node feature dimension mismatch");
    by_level_[nd.level].push_back(nd.node_id);
  }
  for (int l = 0; l <= L; ++l) {
    if (static_cast<int>(by_level_[l].size()) != level_sizes_[l])
      throw InternalError("HierarchyTree: level " + std::to_string(l) +
                          " has " + std::to_string(by_level_[l].size()) + " nodes, expected " +
                          std::to_string(level_sizes_[l]));
  }

  // Parent/child linkage.
  for (const TreeNode& nd : nodes_) {
    if (nd.level == 0) {
      if (nd.parent_id) throw InternalError("HierarchyTree: root must not have a parent");
    } else {
      if (!nd.parent_id) throw InternalError("HierarchyTree: non-root node without parent");
      const TreeNode& parent = node(*nd.parent_id);
      if (parent.level != nd.level - 1)
        throw InternalError("HierarchyTree: parent/child levels not adjacent");
      if (std::find(parent.children_ids.begin(), parent.children_ids.end(), nd.node_id) ==
          parent.children_ids.end())
        throw InternalError("HierarchyTree: parent does not list child " +
                            std::to_string(nd.node_id));
    }
    if (nd.level == L) {
      if (!nd.children_ids.empty()) throw InternalError("HierarchyTree: leaf with children");
    } else {
      if (nd.children_ids.empty()) throw InternalError("HierarchyTree: inner node without children");
      if (!nd.item_ids.empty())
        throw InternalError("HierarchyTree: items mounted on a non-leaf node");
      for (NodeId c : nd.children_ids) {
        if (node(c).parent_id != nd.node_id)
          throw InternalError("HierarchyTree: child does not point back to parent");
      }
    }
  }

  // Closures, bottom-up; leaves own their items, inner nodes merge children.
  closures_.assign(nodes_.size(), {});
  for (int l = L; l >= 0; --l) {
    for (NodeId id : by_level_[l]) {
      const TreeNode& nd = nodes_[id];
      if (nd.is_leaf()) {
        closures_[id] = nd.item_ids;
        std::sort(closures_[id].begin(), closures_[id].end());
      } else {
        std::size_t total = 0;
        for (NodeId c : nd.children_ids) total += closures_[c].size();
        closures_[id].reserve(total);
        for (NodeId c : nd.children_ids)
          closures_[id].insert(closures_[id].end(), closures_[c].begin(), closures_[c].end());
        std::sort(closures_[id].begin(), closures_[id].end());
      }
    }
  }

  // Disjointness: the root closure must not contain duplicate item ids.
  const std::vector<ItemId>& all = closures_[0];
  if (std::adjacent_find(all.begin(), all.end()) != all.end())
    throw InternalError("HierarchyTree: leaf item sets overlap");
}

namespace {

Vec mean_of(const Mat& rows, const std::vector<int>& members) {
  Vec m = Vec::Zero(rows.cols());
  for (int i : members) m += rows.row(i).transpose();
  return m / static_cast<double>(members.size());
}

}  // namespace

HierarchyTree build_tree(const std::vector<ItemEmbedding>& items,
                         const std::vector<int>& level_sizes, int max_iter, std::uint64_t seed) {
  if (items.empty()) throw ConfigError("build_tree: no items");
  if (level_sizes.size() < 2 || level_sizes[0] != 1)
    throw ConfigError("build_tree: level_sizes must be {1, k_1, ..., k_L} with L >= 1");
  for (std::size_t l = 1; l < level_sizes.size(); ++l) {
    if (level_sizes[l] <= level_sizes[l - 1])
      throw ConfigError("build_tree: level sizes must strictly increase from root to leaves");
  }
  const int L = static_cast<int>(level_sizes.size()) - 1;
  if (level_sizes[L] > static_cast<int>(items.size()))
    throw ConfigError("build_tree: more leaves requested than items");
  const int d = static_cast<int>(items[0].vector.size());

  Rng rng(seed);

  // Leaf level: cluster the item vectors.
  std::vector<Vec> pts(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].vector.size() != d) throw ConfigError("build_tree: ragged item dimensions");
    pts[i] = items[i].vector;
  }
  KMeansResult leaf_km = kmeans(pts, level_sizes[L], max_iter, rng);

  // members_per_level[l][j] = item indices (l = L) or child cluster indices.
  // cluster_features[l] holds the pooled feature of each cluster at level l.
  std::vector<std::vector<std::vector<int>>> members(L + 1);
  std::vector<Mat> features(L + 1);

  members[L].assign(level_sizes[L], {});
  for (std::size_t i = 0; i < items.size(); ++i)
    members[L][leaf_km.assignment[i]].push_back(static_cast<int>(i));
  Mat item_rows(items.size(), d);
  for (std::size_t i = 0; i < items.size(); ++i) item_rows.row(i) = items[i].vector;
  features[L].resize(level_sizes[L], d);
  for (int j = 0; j < level_sizes[L]; ++j)
    features[L].row(j) = mean_of(item_rows, members[L][j]).transpose();

  // Upper levels: cluster the child features, unweighted means throughout.
  for (int l = L - 1; l >= 1; --l) {
    std::vector<Vec> child_pts(level_sizes[l + 1]);
    for (int j = 0; j < level_sizes[l + 1]; ++j) child_pts[j] = features[l + 1].row(j).transpose();
    KMeansResult km = kmeans(child_pts, level_sizes[l], max_iter, rng);
    members[l].assign(level_sizes[l], {});
    for (int j = 0; j < level_sizes[l + 1]; ++j) members[l][km.assignment[j]].push_back(j);
    features[l].resize(level_sizes[l], d);
    for (int j = 0; j < level_sizes[l]; ++j)
      features[l].row(j) = mean_of(features[l + 1], members[l][j]).transpose();
  }
  members[0].assign(1, {});
  for (int j = 0; j < level_sizes[1]; ++j) members[0][0].push_back(j);
  features[0].resize(1, d);
  features[0].row(0) = mean_of(features[1], members[0][0]).transpose();

  // Number the nodes level by level and wire up the links.
  std::vector<int> level_base(L + 1);
  int next_id = 0;
  for (int l = 0; l <= L; ++l) {
    level_base[l] = next_id;
    next_id += level_sizes[l];
  }
  std::vector<TreeNode> nodes(next_id);
  for (int l = 0; l <= L; ++l) {
    for (int j = 0; j < level_sizes[l]; ++j) {
      TreeNode& nd = nodes[level_base[l] + j];
      nd.node_id = level_base[l] + j;
      nd.level = l;
      nd.feature = features[l].row(j).transpose();
      if (l == L) {
        nd.item_ids.reserve(members[L][j].size());
        for (int i : members[L][j]) nd.item_ids.push_back(items[i].item_id);
      } else {
        for (int c : members[l][j]) {
          NodeId child = level_base[l + 1] + c;
          nd.children_ids.push_back(child);
          nodes[child].parent_id = nd.node_id;
        }
      }
    }
  }

  return HierarchyTree(level_sizes, d, std::move(nodes));
}

HierarchyTree build_category_grouping(const std::vector<ItemEmbedding>& items,
                                      const std::map<ItemId, std::string>& labels) {
  if (items.empty()) throw ConfigError("build_category_grouping: no items");
  const int d = static_cast<int>(items[0].vector.size());

  // Group by label; std::map keys give the lexicographic leaf order.
  std::map<std::string, std::vector<int>> groups;
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto it = labels.find(items[i].item_id);
    if (it == labels.end())
      throw InputError("build_category_grouping: missing label for item " +
                       std::to_string(items[i].item_id));
    groups[it->second].push_back(static_cast<int>(i));
  }

  Mat item_rows(items.size(), d);
  for (std::size_t i = 0; i < items.size(); ++i) item_rows.row(i) = items[i].vector;

  const int k = static_cast<int>(groups.size());
  std::vector<TreeNode> nodes(1 + k);
  nodes[0].node_id = 0;
  nodes[0].level = 0;
  Vec root_feature = Vec::Zero(d);
  int leaf_id = 1;
  for (const auto& [label, member_idx] : groups) {
    TreeNode& leaf = nodes[leaf_id];
    leaf.node_id = leaf_id;
    leaf.level = 1;
    leaf.parent_id = 0;
    leaf.feature = mean_of(item_rows, member_idx);
    for (int i : member_idx) leaf.item_ids.push_back(items[i].item_id);
    nodes[0].children_ids.push_back(leaf_id);
    root_feature += leaf.feature;
    ++leaf_id;
  }
  nodes[0].feature = root_feature / static_cast<double>(k);

  return HierarchyTree({1, k}, d, std::move(nodes));
}

}  // namespace treebandit
