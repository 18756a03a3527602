#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "treebandit/catalog.hpp"
#include "treebandit/rng.hpp"
#include "treebandit/tree.hpp"

namespace treebandit {

struct RewardDraw {
  double expected = 0.0;  // click probability, in [0, 1]
  int realized = 0;       // Bernoulli(expected) outcome, 0 or 1
};

// Click model parameters: P(click) = sigmoid(scale * <u, x> - bias). An
// optional Gaussian logit noise (noise_sigma > 0) perturbs realized draws
// only; expected_reward always reports the noise-free probability.
struct RewardModel {
  double scale = 5.0;
  double bias = 0.0;
  double noise_sigma = 0.0;  // in [0, 1]
};

// Ground-truth evaluation environment: hidden user vectors, unit-norm item
// embeddings, and the stochastic click model. Immutable after construction;
// draw_reward takes an explicit rng so concurrent evaluation stays
// reproducible.
class SyntheticWorld {
public:
  SyntheticWorld() = default;
  SyntheticWorld(std::vector<UserId> user_ids, std::vector<Vec> user_vectors,
                 std::vector<ItemEmbedding> items, RewardModel model,
                 std::vector<int> item_categories = {});

  // The catalog points into items_, so copies and moves rebuild it.
  SyntheticWorld(const SyntheticWorld& other) { assign(other); }
  SyntheticWorld& operator=(const SyntheticWorld& other) {
    if (this != &other) assign(other);
    return *this;
  }
  SyntheticWorld(SyntheticWorld&& other) noexcept { assign(std::move(other)); }
  SyntheticWorld& operator=(SyntheticWorld&& other) noexcept {
    if (this != &other) assign(std::move(other));
    return *this;
  }

  int dimension() const { return dimension_; }
  std::size_t num_users() const { return user_ids_.size(); }
  std::size_t num_items() const { return items_.size(); }
  std::span<const UserId> user_ids() const { return user_ids_; }
  const std::vector<ItemEmbedding>& items() const { return items_; }
  const ItemCatalog& catalog() const { return catalog_; }
  const RewardModel& model() const { return model_; }

  // Generated worlds label each item with its source blob; imported worlds
  // may carry labels from a category file or none at all.
  const std::vector<int>& item_categories() const { return item_categories_; }
  std::map<ItemId, std::string> category_labels() const;

  const Vec& user_vector(UserId user_id) const;  // unknown id -> InputError
  const Vec& item_vector(ItemId item_id) const;

  double expected_reward(UserId user_id, ItemId item_id) const;
  RewardDraw draw_reward(UserId user_id, ItemId item_id, Rng& rng) const;

  // Hindsight-optimal item: exhaustive argmax of expected reward over every
  // item, ties to the lowest item id. Evaluation-only, exempt from budgets.
  std::pair<ItemId, double> oracle_best(UserId user_id) const;

private:
  template <typename W>
  void assign(W&& other) {
    dimension_ = other.dimension_;
    user_ids_ = std::forward<W>(other).user_ids_;
    user_vectors_ = std::forward<W>(other).user_vectors_;
    user_index_ = std::forward<W>(other).user_index_;
    items_ = std::forward<W>(other).items_;
    model_ = other.model_;
    item_categories_ = std::forward<W>(other).item_categories_;
    catalog_ = items_.empty() ? ItemCatalog() : ItemCatalog(items_);
  }

  int dimension_ = 0;
  std::vector<UserId> user_ids_;
  std::vector<Vec> user_vectors_;
  std::unordered_map<UserId, std::size_t> user_index_;
  std::vector<ItemEmbedding> items_;
  ItemCatalog catalog_;
  RewardModel model_;
  std::vector<int> item_categories_;
};

// Synthetic world generator: num_blobs Gaussian clusters of unit-norm items;
// each user is a normalized noisy mixture of 1-3 blob centers. Deterministic
// per seed.
SyntheticWorld gen_synthetic(int num_users, int num_items, int dimension, int num_blobs,
                             std::uint64_t seed, RewardModel model = {});

// Loads a world from embedding files (binary or CSV, auto-detected). Item
// vectors are re-normalized to unit length after f32 quantization; the two
// files must agree on dimension. Optional label file attaches categories.
SyntheticWorld import_world(const std::string& item_file, const std::string& user_file,
                            RewardModel model = {}, const std::string& label_file = {});

// Writes items (and users) of a world in both interchange formats plus the
// category label file; filenames are fixed within out_dir.
struct WorldFiles {
  std::string items_bin, items_csv, users_bin, users_csv, labels_csv;
};
WorldFiles export_world(const SyntheticWorld& world, const std::string& out_dir);

// Cumulative expected regret: running sum of (oracle - policy) per round.
// Inputs are per-round expected rewards; lengths must match.
std::vector<double> cumulative_regret(std::span<const double> oracle_expected,
                                      std::span<const double> policy_expected);

}  // namespace treebandit
