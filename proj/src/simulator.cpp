#include "treebandit/simulator.hpp"

#include <cmath>
#include <filesystem>

#include "treebandit/embedding_io.hpp"
#include "treebandit/errors.hpp"

namespace treebandit {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Vec random_unit(int d, Rng& rng) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.normal();
  double n = v.norm();
  if (n == 0.0) v[0] = 1.0; else v /= n;
  return v;
}

}  // namespace

SyntheticWorld::SyntheticWorld(std::vector<UserId> user_ids, std::vector<Vec> user_vectors,
                               std::vector<ItemEmbedding> items, RewardModel model,
                               std::vector<int> item_categories)
    : user_ids_(std::move(user_ids)),
      user_vectors_(std::move(user_vectors)),
      items_(std::move(items)),
      model_(model),
      item_categories_(std::move(item_categories)) {
  if (user_ids_.size() != user_vectors_.size())
    throw InputError("SyntheticWorld: user id/vector count mismatch");
  if (items_.empty() || user_ids_.empty()) throw InputError("SyntheticWorld: empty users or items");
  if (!item_categories_.empty() && item_categories_.size() != items_.size())
    throw InputError("SyntheticWorld: category count does not match item count");
  if (model_.noise_sigma < 0.0 || model_.noise_sigma > 1.0)
    throw ConfigError("SyntheticWorld: noise_sigma must be in [0, 1]");

  dimension_ = static_cast<int>(items_[0].vector.size());
  for (const ItemEmbedding& e : items_) {
    if (e.vector.size() != dimension_) throw InputError("SyntheticWorld: ragged item dimensions");
    if (std::abs(e.vector.norm() - 1.0) > 1e-6)
      throw InputError("SyntheticWorld: item " + std::to_string(e.item_id) + " is not unit norm");
  }
  for (std::size_t i = 0; i < user_ids_.size(); ++i) {
    if (user_vectors_[i].size() != dimension_)
      throw InputError("SyntheticWorld: user vector dimension mismatch");
    if (!user_index_.emplace(user_ids_[i], i).second)
      throw InputError("SyntheticWorld: duplicate user id " + std::to_string(user_ids_[i]));
  }
  catalog_ = ItemCatalog(items_);
}

std::map<ItemId, std::string> SyntheticWorld::category_labels() const {
  std::map<ItemId, std::string> labels;
  if (item_categories_.empty()) return labels;
  for (std::size_t i = 0; i < items_.size(); ++i)
    labels[items_[i].item_id] = "c" + std::to_string(item_categories_[i]);
  return labels;
}

const Vec& SyntheticWorld::user_vector(UserId user_id) const {
  auto it = user_index_.find(user_id);
  if (it == user_index_.end())
    throw InputError("SyntheticWorld: unknown user id " + std::to_string(user_id));
  return user_vectors_[it->second];
}

const Vec& SyntheticWorld::item_vector(ItemId item_id) const { return catalog_.feature(item_id); }

double SyntheticWorld::expected_reward(UserId user_id, ItemId item_id) const {
  double dot = user_vector(user_id).dot(item_vector(item_id));
  return sigmoid(model_.scale * dot - model_.bias);
}

RewardDraw SyntheticWorld::draw_reward(UserId user_id, ItemId item_id, Rng& rng) const {
  RewardDraw draw;
  draw.expected = expected_reward(user_id, item_id);
  double prob = draw.expected;
  if (model_.noise_sigma > 0.0) {
    double dot = user_vector(user_id).dot(item_vector(item_id));
    prob = sigmoid(model_.scale * dot - model_.bias + model_.noise_sigma * rng.normal());
  }
  draw.realized = rng.uniform() < prob ? 1 : 0;
  return draw;
}

std::pair<ItemId, double> SyntheticWorld::oracle_best(UserId user_id) const {
  const Vec& u = user_vector(user_id);
  // sigmoid is monotone, so the max inner product wins.
  ItemId best_id = items_[0].item_id;
  double best_dot = u.dot(items_[0].vector);
  for (std::size_t i = 1; i < items_.size(); ++i) {
    double dot = u.dot(items_[i].vector);
    if (dot > best_dot || (dot == best_dot && items_[i].item_id < best_id)) {
      best_dot = dot;
      best_id = items_[i].item_id;
    }
  }
  return {best_id, sigmoid(model_.scale * best_dot - model_.bias)};
}

SyntheticWorld gen_synthetic(int num_users, int num_items, int dimension, int num_blobs,
                             std::uint64_t seed, RewardModel model) {
  if (num_users < 1 || num_items < 1 || dimension < 1 || num_blobs < 1)
    throw ConfigError("gen_synthetic: all counts must be >= 1");
  if (num_blobs > num_items) throw ConfigError("gen_synthetic: more blobs than items");

  constexpr double kBlobSigma = 0.25;  // item scatter around its blob center
  constexpr double kUserSigma = 0.10;  // user scatter around the mixture

  Rng rng(seed);
  std::vector<Vec> centers(num_blobs);
  for (int b = 0; b < num_blobs; ++b) centers[b] = random_unit(dimension, rng);

  std::vector<ItemEmbedding> items(num_items);
  std::vector<int> categories(num_items);
  for (int i = 0; i < num_items; ++i) {
    int blob = i % num_blobs;  // round-robin keeps blob sizes balanced
    Vec v = centers[blob];
    for (int j = 0; j < dimension; ++j) v[j] += kBlobSigma * rng.normal();
    double n = v.norm();
    if (n == 0.0) v = centers[blob]; else v /= n;
    items[i] = {static_cast<ItemId>(i), std::move(v)};
    categories[i] = blob;
  }

  std::vector<UserId> user_ids(num_users);
  std::vector<Vec> user_vecs(num_users);
  for (int u = 0; u < num_users; ++u) {
    user_ids[u] = static_cast<UserId>(u);
    int mixture = 1 + static_cast<int>(rng.uniform_int(3));  // 1-3 interest blobs
    mixture = std::min(mixture, num_blobs);
    std::vector<std::size_t> picked =
        rng.sample_indices(static_cast<std::size_t>(num_blobs), static_cast<std::size_t>(mixture));
    Vec v = Vec::Zero(dimension);
    for (std::size_t b : picked) {
      double w = 0.5 + 0.5 * rng.uniform();  // weights in [0.5, 1)
      v += w * centers[b];
    }
    for (int j = 0; j < dimension; ++j) v[j] += kUserSigma * rng.normal();
    double n = v.norm();
    if (n == 0.0) v = centers[picked[0]]; else v /= n;
    user_vecs[u] = std::move(v);
  }

  return SyntheticWorld(std::move(user_ids), std::move(user_vecs), std::move(items), model,
                        std::move(categories));
}

SyntheticWorld import_world(const std::string& item_file, const std::string& user_file,
                            RewardModel model, const std::string& label_file) {
  std::vector<ItemEmbedding> items = read_embeddings(item_file);
  std::vector<ItemEmbedding> users = read_embeddings(user_file);
  if (items.empty()) throw InputError("import_world: no items in " + item_file);
  if (users.empty()) throw InputError("import_world: no users in " + user_file);
  if (items[0].vector.size() != users[0].vector.size())
    throw InputError("import_world: item dimension " + std::to_string(items[0].vector.size()) +
                     " != user dimension " + std::to_string(users[0].vector.size()));

  // Imported item embeddings are renormalized; f32 quantization alone is
  // enough to break exact unit norm.
  for (ItemEmbedding& e : items) {
    double n = e.vector.norm();
    if (n == 0.0)
      throw InputError("import_world: zero item vector, id " + std::to_string(e.item_id));
    e.vector /= n;
  }

  std::vector<int> categories;
  if (!label_file.empty()) {
    std::map<ItemId, std::string> labels = read_labels_csv(label_file);
    std::map<std::string, int> dense;
    for (const auto& [id, label] : labels)
      dense.emplace(label, static_cast<int>(dense.size()));
    categories.reserve(items.size());
    for (const ItemEmbedding& e : items) {
      auto it = labels.find(e.item_id);
      if (it == labels.end())
        throw InputError("import_world: missing label for item " + std::to_string(e.item_id));
      categories.push_back(dense[it->second]);
    }
  }

  std::vector<UserId> user_ids;
  std::vector<Vec> user_vecs;
  user_ids.reserve(users.size());
  user_vecs.reserve(users.size());
  for (ItemEmbedding& e : users) {
    user_ids.push_back(e.item_id);
    user_vecs.push_back(std::move(e.vector));
  }
  return SyntheticWorld(std::move(user_ids), std::move(user_vecs), std::move(items), model,
                        std::move(categories));
}

WorldFiles export_world(const SyntheticWorld& world, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  WorldFiles files;
  files.items_bin = (fs::path(out_dir) / "items.emb").string();
  files.items_csv = (fs::path(out_dir) / "items.csv").string();
  files.users_bin = (fs::path(out_dir) / "users.emb").string();
  files.users_csv = (fs::path(out_dir) / "users.csv").string();
  write_embeddings_binary(files.items_bin, world.items());
  write_embeddings_csv(files.items_csv, world.items());

  std::vector<ItemEmbedding> users(world.num_users());
  for (std::size_t i = 0; i < world.num_users(); ++i)
    users[i] = {world.user_ids()[i], world.user_vector(world.user_ids()[i])};
  write_embeddings_binary(files.users_bin, users);
  write_embeddings_csv(files.users_csv, users, "user_id");

  if (!world.item_categories().empty()) {
    files.labels_csv = (fs::path(out_dir) / "labels.csv").string();
    write_labels_csv(files.labels_csv, world.category_labels());
  }
  return files;
}

std::vector<double> cumulative_regret(std::span<const double> oracle_expected,
                                      std::span<const double> policy_expected) {
  if (oracle_expected.size() != policy_expected.size())
    throw InternalError("cumulative_regret: oracle and policy series lengths differ");
  std::vector<double> out(oracle_expected.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < oracle_expected.size(); ++t) {
    acc += oracle_expected[t] - policy_expected[t];
    out[t] = acc;
  }
  return out;
}

}  // namespace treebandit
