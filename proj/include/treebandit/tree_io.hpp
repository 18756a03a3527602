#pragma once

#include <iosfwd>
#include <string>

#include "treebandit/tree.hpp"

namespace treebandit {

// JSON tree file: {level_sizes, dimension, nodes:[{node_id, level, parent_id,
// children_ids, item_ids, feature}]}. parent_id is null on the root. Features
// round-trip exactly (shortest-representation doubles).
void serialize_tree(const HierarchyTree& tree, std::ostream& out);
void serialize_tree(const HierarchyTree& tree, const std::string& path);

// Throws InputError on malformed JSON, missing fields, or a tree that fails
// structural validation; messages carry the offending field or byte position.
HierarchyTree deserialize_tree(std::istream& in, const std::string& origin = "<stream>");
HierarchyTree deserialize_tree(const std::string& path);

}  // namespace treebandit
