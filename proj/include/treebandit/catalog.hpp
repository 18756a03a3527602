#pragma once

#include <unordered_map>
#include <vector>

#include "treebandit/errors.hpp"
#include "treebandit/tree.hpp"

namespace treebandit {

// Id -> feature lookup over an immutable item list.
class ItemCatalog {
public:
  ItemCatalog() = default;
  explicit ItemCatalog(const std::vector<ItemEmbedding>& items) : items_(&items) {
    index_.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) index_.emplace(items[i].item_id, i);
  }

  std::size_t size() const { return items_ ? items_->size() : 0; }

  const std::vector<ItemEmbedding>& items() const { return *items_; }

  const Vec& feature(ItemId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw InputError("ItemCatalog: unknown item id " + std::to_string(id));
    return (*items_)[it->second].vector;
  }

  bool contains(ItemId id) const { return index_.find(id) != index_.end(); }

private:
  const std::vector<ItemEmbedding>* items_ = nullptr;
  std::unordered_map<ItemId, std::size_t> index_;
};

}  // namespace treebandit
