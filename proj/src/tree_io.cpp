#include "treebandit/tree_io.hpp"

#include <fstream>
#include <json.hpp>

#include "treebandit/errors.hpp"

namespace treebandit {

using nlohmann::json;

void serialize_tree(const HierarchyTree& tree, std::ostream& out) {
  json doc;
  doc["level_sizes"] = tree.level_sizes();
  doc["dimension"] = tree.dimension();
  json nodes = json::array();
  for (const TreeNode& nd : tree.nodes()) {
    json jn;
    jn["node_id"] = nd.node_id;
    jn["level"] = nd.level;
    if (nd.parent_id)
      jn["parent_id"] = *nd.parent_id;
    else
      jn["parent_id"] = nullptr;
    jn["children_ids"] = nd.children_ids;
    jn["item_ids"] = nd.item_ids;
    std::vector<double> feat(nd.feature.data(), nd.feature.data() + nd.feature.size());
    jn["feature"] = feat;
    nodes.push_back(std::move(jn));
  }
  doc["nodes"] = std::move(nodes);
  out << doc.dump(1) << "\n";
}

void serialize_tree(const HierarchyTree& tree, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("serialize_tree: cannot open " + path + " for writing");
  serialize_tree(tree, out);
}

HierarchyTree deserialize_tree(std::istream& in, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("tree file " + origin + ": " + e.what());
  }

  try {
    std::vector<int> level_sizes = doc.at("level_sizes").get<std::vector<int>>();
    int dimension = doc.at("dimension").get<int>();
    std::vector<TreeNode> nodes;
    nodes.resize(doc.at("nodes").size());
    for (const json& jn : doc.at("nodes")) {
      TreeNode nd;
      nd.node_id = jn.at("node_id").get<NodeId>();
      nd.level = jn.at("level").get<int>();
      if (!jn.at("parent_id").is_null()) nd.parent_id = jn.at("parent_id").get<NodeId>();
      nd.children_ids = jn.at("children_ids").get<std::vector<NodeId>>();
      nd.item_ids = jn.at("item_ids").get<std::vector<ItemId>>();
      std::vector<double> feat = jn.at("feature").get<std::vector<double>>();
      nd.feature = Eigen::Map<const Vec>(feat.data(), static_cast<Eigen::Index>(feat.size()));
      if (nd.node_id < 0 || static_cast<std::size_t>(nd.node_id) >= nodes.size())
        throw InputError("tree file " + origin + ": node_id " + std::to_string(nd.node_id) +
                         " out of range");
      nodes[nd.node_id] = std::move(nd);
    }
    return HierarchyTree(std::move(level_sizes), dimension, std::move(nodes));
  } catch (const json::exception& e) {
    throw InputError("tree file " + origin + ": " + e.what());
  } catch (const InternalError& e) {
    // Structural validation failures on load are input problems, not bugs.
    throw InputError("tree file " + origin + ": " + e.what());
  }
}

HierarchyTree deserialize_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("deserialize_tree: cannot open " + path);
  return deserialize_tree(in, path);
}

}  // namespace treebandit
