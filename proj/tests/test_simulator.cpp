#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <unistd.h>

#include "treebandit/embedding_io.hpp"
#include "treebandit/errors.hpp"
#include "treebandit/simulator.hpp"

using namespace treebandit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("treebandit_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("generated worlds are unit-norm and deterministic") {
  SyntheticWorld a = gen_synthetic(10, 200, 8, 4, 42);
  SyntheticWorld b = gen_synthetic(10, 200, 8, 4, 42);
  CHECK(a.num_items() == 200);
  CHECK(a.num_users() == 10);
  CHECK(a.item_categories().size() == 200);

  for (const ItemEmbedding& e : a.items()) CHECK(std::abs(e.vector.norm() - 1.0) < 1e-6);

  for (std::size_t i = 0; i < a.num_items(); ++i)
    CHECK(a.items()[i].vector == b.items()[i].vector);  // bitwise
  for (UserId u : a.user_ids()) CHECK(a.user_vector(u) == b.user_vector(u));

  SyntheticWorld c = gen_synthetic(10, 200, 8, 4, 43);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.num_items() && !any_diff; ++i)
    any_diff = a.items()[i].vector != c.items()[i].vector;
  CHECK(any_diff);
}

TEST_CASE("invalid generation counts rejected") {
  CHECK_THROWS_AS(gen_synthetic(0, 10, 4, 2, 1), ConfigError);
  CHECK_THROWS_AS(gen_synthetic(5, 10, 4, 11, 1), ConfigError);  // blobs > items
}

TEST_CASE("single blob: expected reward is monotone in the angle to the center") {
  SyntheticWorld w = gen_synthetic(5, 100, 8, 1, 7, {5.0, 0.0, 0.0});
  UserId uid = w.user_ids()[0];
  const Vec& u = w.user_vector(uid);
  // Sort items by inner product; expected rewards must follow the same order.
  std::vector<std::pair<double, ItemId>> by_dot;
  for (const ItemEmbedding& e : w.items()) by_dot.push_back({u.dot(e.vector), e.item_id});
  std::sort(by_dot.begin(), by_dot.end());
  double prev = -1.0;
  for (const auto& [dot, id] : by_dot) {
    double er = w.expected_reward(uid, id);
    CHECK(er >= prev);
    prev = er;
  }
}

TEST_CASE("expected reward is the squashed inner product") {
  // Hand-built two-item world: user aligned with item 0, orthogonal to item 1.
  std::vector<ItemEmbedding> items{{0, Vec(Vec::Unit(4, 0))}, {1, Vec(Vec::Unit(4, 1))}};
  std::vector<Vec> users{Vec(Vec::Unit(4, 0))};
  SyntheticWorld w({77}, users, items, {5.0, 0.0, 0.0});

  CHECK(w.expected_reward(77, 1) == doctest::Approx(0.5));             // sigmoid(0)
  CHECK(w.expected_reward(77, 0) == doctest::Approx(1.0 / (1.0 + std::exp(-5.0))));
  CHECK_THROWS_AS(w.expected_reward(78, 0), InputError);
  CHECK_THROWS_AS(w.expected_reward(77, 9), InputError);

  // Saturation: a huge scale drives the aligned item's probability to 1.
  SyntheticWorld sat({77}, users, items, {1000.0, 0.0, 0.0});
  CHECK(sat.expected_reward(77, 0) == doctest::Approx(1.0));
}

TEST_CASE("degenerate Bernoulli draws") {
  std::vector<ItemEmbedding> items{{0, Vec(Vec::Unit(4, 0))}};
  std::vector<Vec> users{Vec(Vec::Unit(4, 0))};
  SyntheticWorld one({1}, users, items, {1e9, 0.0, 0.0});   // p -> 1
  SyntheticWorld zero({1}, users, items, {-1e9, 0.0, 0.0});  // p -> 0
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    CHECK(one.draw_reward(1, 0, rng).realized == 1);
    CHECK(zero.draw_reward(1, 0, rng).realized == 0);
  }
}

TEST_CASE("Monte-Carlo click frequency matches the expected reward") {
  SyntheticWorld w = gen_synthetic(5, 50, 8, 3, 11, {5.0, 1.0, 0.0});
  Rng pick(1);
  for (int trial = 0; trial < 5; ++trial) {
    UserId uid = w.user_ids()[pick.uniform_int(w.num_users())];
    ItemId iid = w.items()[pick.uniform_int(w.num_items())].item_id;
    double p = w.expected_reward(uid, iid);
    const int n = 100000;
    Rng rng(100 + trial);
    int clicks = 0;
    for (int i = 0; i < n; ++i) clicks += w.draw_reward(uid, iid, rng).realized;
    double freq = static_cast<double>(clicks) / n;
    double sd = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(freq - p) <= 3.0 * sd + 1e-12);
  }
}

TEST_CASE("oracle_best is the exhaustive argmax") {
  SyntheticWorld w = gen_synthetic(3, 100, 8, 5, 13);
  for (UserId uid : w.user_ids()) {
    auto [best_id, best_er] = w.oracle_best(uid);
    double max_er = -1.0;
    ItemId max_id = 0;
    for (const ItemEmbedding& e : w.items()) {
      double er = w.expected_reward(uid, e.item_id);
      if (er > max_er) {
        max_er = er;
        max_id = e.item_id;
      }
    }
    CHECK(best_id == max_id);
    CHECK(best_er == doctest::Approx(max_er).epsilon(1e-12));
    for (const ItemEmbedding& e : w.items()) CHECK(best_er >= w.expected_reward(uid, e.item_id));
  }
}

TEST_CASE("oracle on a matching unit vector returns that item") {
  std::vector<ItemEmbedding> items{{5, Vec(Vec::Unit(4, 2))}, {9, Vec(Vec::Unit(4, 3))}};
  std::vector<Vec> users{Vec(Vec::Unit(4, 3))};
  SyntheticWorld w({0}, users, items, {});
  CHECK(w.oracle_best(0).first == 9);

  std::vector<ItemEmbedding> single{{123, Vec(Vec::Unit(4, 0))}};
  SyntheticWorld s({0}, users, single, {});
  CHECK(s.oracle_best(0).first == 123);
}

TEST_CASE("cumulative regret: zero for the oracle, additive, hand example") {
  std::vector<double> oracle{0.9, 0.9};
  std::vector<double> policy{0.6, 0.9};
  auto series = cumulative_regret(oracle, policy);
  REQUIRE(series.size() == 2);
  CHECK(series[0] == doctest::Approx(0.3));
  CHECK(series[1] == doctest::Approx(0.3));

  auto zero = cumulative_regret(oracle, oracle);
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);

  // Additivity: R over 1..T splits at any k.
  std::vector<double> o{0.9, 0.8, 0.95, 0.7}, q{0.1, 0.5, 0.9, 0.65};
  auto full = cumulative_regret(o, q);
  auto head = cumulative_regret(std::span(o).subspan(0, 2), std::span(q).subspan(0, 2));
  auto tail = cumulative_regret(std::span(o).subspan(2), std::span(q).subspan(2));
  CHECK(full.back() == doctest::Approx(head.back() + tail.back()));

  // Monotone non-decreasing when the oracle dominates.
  for (std::size_t t = 1; t < full.size(); ++t) CHECK(full[t] >= full[t - 1]);

  CHECK_THROWS_AS(cumulative_regret(std::span(o).subspan(0, 3), q), InternalError);
}

TEST_CASE("export/import round-trip preserves expected rewards within 1e-6") {
  TempDir tmp;
  SyntheticWorld w = gen_synthetic(8, 120, 8, 4, 17, {5.0, 1.0, 0.0});
  WorldFiles files = export_world(w, tmp.path.string());

  SyntheticWorld bin = import_world(files.items_bin, files.users_bin, {5.0, 1.0, 0.0},
                                    files.labels_csv);
  SyntheticWorld csv = import_world(files.items_csv, files.users_csv, {5.0, 1.0, 0.0},
                                    files.labels_csv);

  CHECK(bin.item_categories() == w.item_categories());
  for (UserId uid : w.user_ids()) {
    for (const ItemEmbedding& e : w.items()) {
      double orig = w.expected_reward(uid, e.item_id);
      CHECK(std::abs(bin.expected_reward(uid, e.item_id) - orig) < 1e-6);
      // Binary and CSV deliver bit-identical worlds.
      CHECK(bin.expected_reward(uid, e.item_id) == csv.expected_reward(uid, e.item_id));
    }
  }
}

TEST_CASE("import rejects dimension mismatches") {
  TempDir tmp;
  SyntheticWorld w8 = gen_synthetic(4, 20, 8, 2, 19);
  SyntheticWorld w4 = gen_synthetic(4, 20, 4, 2, 19);
  WorldFiles f8 = export_world(w8, (tmp.path / "a").string());
  WorldFiles f4 = export_world(w4, (tmp.path / "b").string());
  CHECK_THROWS_AS(import_world(f8.items_bin, f4.users_bin), InputError);
}

TEST_CASE("noise sigma outside [0,1] rejected; logit noise only perturbs draws") {
  std::vector<ItemEmbedding> items{{0, Vec(Vec::Unit(4, 0))}};
  std::vector<Vec> users{Vec(Vec::Unit(4, 0))};
  CHECK_THROWS_AS(SyntheticWorld({1}, users, items, {5.0, 0.0, 1.5}), ConfigError);

  SyntheticWorld noisy({1}, users, items, {5.0, 5.0, 1.0});
  SyntheticWorld clean({1}, users, items, {5.0, 5.0, 0.0});
  CHECK(noisy.expected_reward(1, 0) == clean.expected_reward(1, 0));
  // With logit noise the click rate shifts away from the noise-free mean
  // (sigmoid is nonlinear), but stays a valid frequency.
  Rng rng(3);
  int clicks = 0;
  for (int i = 0; i < 20000; ++i) clicks += noisy.draw_reward(1, 0, rng).realized;
  CHECK(clicks > 0);
  CHECK(clicks < 20000);
}
