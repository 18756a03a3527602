#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "treebandit/errors.hpp"
#include "treebandit/policies.hpp"

using namespace treebandit;

namespace {

// Hand-built 3-level tree (root + 2 node levels + leaves at level 3 would be
// depth 3; here depth 2): root 0; level 1 = {1, 2, 3}; level 2 leaves = two
// per inner node. Items are mounted two per leaf. Features are standard basis
// vectors so cold-start scores tie exactly.
struct FixtureTree {
  std::vector<ItemEmbedding> items;
  HierarchyTree tree;
  ItemCatalog catalog;

  static constexpr int kDim = 16;

  FixtureTree() {
    std::vector<TreeNode> nodes(10);
    auto basis = [](int i) { return Vec(Vec::Unit(kDim, i)); };

    nodes[0] = {0, 0, std::nullopt, {1, 2, 3}, {}, basis(0)};
    for (int j = 0; j < 3; ++j) {
      NodeId id = 1 + j;
      nodes[id] = {id, 1, 0, {4 + 2 * j, 5 + 2 * j}, {}, basis(1 + j)};
    }
    int item_id = 100;
    for (int leaf = 4; leaf <= 9; ++leaf) {
      std::vector<ItemId> mounted{static_cast<ItemId>(item_id),
                                  static_cast<ItemId>(item_id + 1)};
      item_id += 2;
      nodes[leaf] = {leaf, 2, 1 + (leaf - 4) / 2, {}, mounted, basis(4 + (leaf - 4))};
    }
    for (int i = 0; i < 12; ++i)
      items.push_back({static_cast<ItemId>(100 + i), basis(4 + i % 12 % kDim)});
    tree = HierarchyTree({1, 3, 6}, kDim, std::move(nodes));
    catalog = ItemCatalog(items);
  }
};

std::vector<ItemEmbedding> random_unit_items(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ItemEmbedding> items(n);
  for (int i = 0; i < n; ++i) {
    Vec v(d);
    for (int j = 0; j < d; ++j) v[j] = rng.normal();
    items[i] = {static_cast<ItemId>(i), v / v.norm()};
  }
  return items;
}

void check_field_partition(const PhcbUserState& user, const HierarchyTree& tree) {
  std::set<ItemId> seen;
  std::size_t total = 0;
  for (NodeId id : user.receptive_field) {
    const auto& closure = tree.item_closure(id);
    total += closure.size();
    seen.insert(closure.begin(), closure.end());
  }
  REQUIRE(total == tree.item_count());   // disjoint
  REQUIRE(seen.size() == tree.item_count());  // exhaustive
}

}  // namespace

TEST_CASE("item closures follow the child-union definition") {
  FixtureTree fx;
  CHECK(fx.tree.item_closure(4) == std::vector<ItemId>{100, 101});
  CHECK(fx.tree.item_closure(1) == std::vector<ItemId>{100, 101, 102, 103});
  CHECK(fx.tree.item_closure(0).size() == 12);
}

TEST_CASE("hcb returns a valid root-to-leaf path plus a mounted item") {
  FixtureTree fx;
  HcbUserState user(FixtureTree::kDim, fx.tree.depth());
  Rng rng(1);
  BudgetLedger ledger(50);
  ledger.begin_round();
  PolicyOutcome out =
      hcb_select(user, fx.tree, fx.catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng, &ledger);

  REQUIRE(out.node_path.size() == 3);  // root + 2 levels
  CHECK(out.node_path[0] == 0);
  for (std::size_t i = 1; i < out.node_path.size(); ++i) {
    const TreeNode& child = fx.tree.node(out.node_path[i]);
    CHECK(child.parent_id == out.node_path[i - 1]);
  }
  const TreeNode& leaf = fx.tree.node(out.node_path.back());
  CHECK(leaf.is_leaf());
  CHECK(std::find(leaf.item_ids.begin(), leaf.item_ids.end(), out.chosen_item) !=
        leaf.item_ids.end());
  CHECK(out.scores_charged == ledger.spent());
  CHECK(out.stage_scores.size() == 3);
}

TEST_CASE("hcb cold start descends by lowest node id on exact ties") {
  FixtureTree fx;
  HcbUserState user(FixtureTree::kDim, fx.tree.depth());
  Rng rng(2);
  PolicyOutcome out =
      hcb_select(user, fx.tree, fx.catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng);
  CHECK(out.node_path == std::vector<NodeId>{0, 1, 4});
  CHECK(out.chosen_item == 100);
}

TEST_CASE("hcb on a single-child chain has no choice anywhere") {
  // root -> only child -> only leaf with items {7, 9}.
  const int d = 4;
  std::vector<TreeNode> nodes(3);
  nodes[0] = {0, 0, std::nullopt, {1}, {}, Vec(Vec::Unit(d, 0))};
  nodes[1] = {1, 1, 0, {2}, {}, Vec(Vec::Unit(d, 1))};
  nodes[2] = {2, 2, 1, {}, {7, 9}, Vec(Vec::Unit(d, 2))};
  HierarchyTree chain({1, 1, 1}, d, std::move(nodes));

  std::vector<ItemEmbedding> items{{7, Vec(Vec::Unit(d, 0))}, {9, Vec(Vec::Unit(d, 1))}};
  ItemCatalog catalog(items);
  HcbUserState user(d, 2);
  Rng rng(3);
  PolicyOutcome out = hcb_select(user, chain, catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng);
  CHECK(out.node_path == std::vector<NodeId>{0, 1, 2});
  CHECK(out.chosen_item == 7);  // tie-break on exact symmetric scores
}

TEST_CASE("hcb rejects a budget below one score per decision") {
  FixtureTree fx;
  HcbUserState user(FixtureTree::kDim, fx.tree.depth());
  Rng rng(4);
  CHECK_THROWS_AS(
      hcb_select(user, fx.tree, fx.catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 2, rng),
      std::invalid_argument);
}

TEST_CASE("hcb reaching an empty leaf reports a corrupt tree") {
  const int d = 4;
  std::vector<TreeNode> nodes(3);
  nodes[0] = {0, 0, std::nullopt, {1, 2}, {}, Vec(Vec::Unit(d, 0))};
  nodes[1] = {1, 1, 0, {}, {}, Vec(Vec::Unit(d, 1))};      // empty leaf, lowest id
  nodes[2] = {2, 1, 0, {}, {42}, Vec(Vec::Unit(d, 2))};
  HierarchyTree tree({1, 2}, d, std::move(nodes));
  std::vector<ItemEmbedding> items{{42, Vec(Vec::Unit(d, 0))}};
  ItemCatalog catalog(items);
  HcbUserState user(d, 1);
  Rng rng(5);
  CHECK_THROWS_AS(hcb_select(user, tree, catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng),
                  InternalError);
}

TEST_CASE("hcb update touches exactly one state per level") {
  FixtureTree fx;
  HcbUserState user(FixtureTree::kDim, fx.tree.depth());
  Rng rng(6);
  PolicyOutcome out =
      hcb_select(user, fx.tree, fx.catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng);
  hcb_update(user, fx.tree, fx.catalog, out, 1.0);
  for (const RidgeState& s : user.states) CHECK(s.update_count() == 1);

  // r = 0 still updates every inverse Gram but leaves b untouched.
  PolicyOutcome out2 =
      hcb_select(user, fx.tree, fx.catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng);
  std::vector<Mat> before;
  for (const RidgeState& s : user.states) before.push_back(s.a_inv());
  hcb_update(user, fx.tree, fx.catalog, out2, 0.0);
  for (std::size_t l = 0; l < user.states.size(); ++l) {
    CHECK(user.states[l].update_count() == 2);
    CHECK((user.states[l].a_inv() - before[l]).cwiseAbs().maxCoeff() > 0.0);
  }
  CHECK(user.states[1].b().isZero(0.0) == false);  // from the first r=1 round
}

TEST_CASE("hcb per-level theta matches a batch ridge solve of its history") {
  FixtureTree fx;
  HcbUserState user(FixtureTree::kDim, fx.tree.depth());
  Rng rng(7);
  const int d = FixtureTree::kDim;
  std::vector<Mat> gram(3, Mat::Identity(d, d));
  std::vector<Vec> rhs(3, Vec::Zero(d));

  for (int t = 0; t < 200; ++t) {
    PolicyOutcome out =
        hcb_select(user, fx.tree, fx.catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng);
    double r = rng.uniform() < 0.5 ? 1.0 : 0.0;
    hcb_update(user, fx.tree, fx.catalog, out, r);
    for (int l = 1; l <= 2; ++l) {
      const Vec& x = fx.tree.node(out.node_path[l]).feature;
      gram[l] += x * x.transpose();
      rhs[l] += r * x;
    }
    const Vec& xi = fx.catalog.feature(out.chosen_item);
    gram[0] += xi * xi.transpose();
    rhs[0] += r * xi;
  }
  for (int l = 0; l <= 2; ++l) {
    Vec direct = gram[l].ldlt().solve(rhs[l]);
    CHECK((user.states[l].theta() - direct).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("expansion rule boundaries") {
  // Level 1: ln 1 = 0, so one positive-reward selection expands and one
  // zero-reward selection does not (strict inequality).
  CHECK(check_expansion({1, 1.0}, 1, 10.0, 0.1));
  CHECK_FALSE(check_expansion({1, 0.0}, 1, 10.0, 0.1));
  CHECK_FALSE(check_expansion({0, 0.0}, 1, 10.0, 0.1));

  // Level 2 with q=10: floor(10 ln 2) = 6 selections needed.
  CHECK_FALSE(check_expansion({5, 5.0}, 2, 10.0, 0.1));
  CHECK(check_expansion({7, 1.0}, 2, 10.0, 0.1));       // avg 0.143 > 0.0693
  CHECK_FALSE(check_expansion({7, 0.4}, 2, 10.0, 0.1));  // avg 0.057 < 0.0693
  CHECK_FALSE(check_expansion({0, 0.0}, 2, 10.0, 0.1));

  CHECK_THROWS_AS(check_expansion({1, 1.0}, 0, 10.0, 0.1), std::invalid_argument);
}

TEST_CASE("phcb splits the budget across its two stages") {
  auto items = random_unit_items(300, 8, 10);
  HierarchyTree tree = build_tree(items, {1, 4, 30}, 100, 11);
  ItemCatalog catalog(items);
  PhcbUserState user(8, 0);
  Rng rng(12);
  BudgetLedger ledger(50);

  for (int t = 0; t < 50; ++t) {
    ledger.begin_round();
    PolicyOutcome out =
        phcb_select(user, tree, catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng, &ledger);
    REQUIRE(out.stage_scores.size() == 2);
    CHECK(out.stage_scores[0] <= 25);
    CHECK(out.stage_scores[1] <= 25);
    CHECK(out.scores_charged <= 50);
    // Containment: the item comes from the chosen node's closure.
    const auto& closure = tree.item_closure(out.node_path[0]);
    CHECK(std::binary_search(closure.begin(), closure.end(), out.chosen_item));
    phcb_update(user, tree, catalog, out, rng.uniform() < 0.5 ? 1.0 : 0.0, 10.0, 0.1);
    check_field_partition(user, tree);
  }
}

TEST_CASE("phcb with root-only field reduces to an item bandit over everything") {
  FixtureTree fx;
  PhcbUserState user(FixtureTree::kDim, 0);
  Rng rng(13);
  PolicyOutcome out =
      phcb_select(user, fx.tree, fx.catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng);
  CHECK(out.node_path == std::vector<NodeId>{0});
  CHECK(out.chosen_item >= 100);
  CHECK(out.stage_scores[0] == 1);  // a single visible node still costs one score
}

TEST_CASE("phcb expansion replaces the chosen node with its children") {
  FixtureTree fx;
  PhcbUserState user(FixtureTree::kDim, 0);
  // Receptive field {1, 2, 3} with node 2 one positive update away from
  // expansion at level 2 (needs 6 selections at q=10 and avg > 0.0693).
  user.receptive_field = {1, 2, 3};
  user.stats[2] = {6, 5.0};

  PolicyOutcome outcome;
  outcome.node_path = {2};
  outcome.chosen_item = 104;  // mounted under node 2
  phcb_update(user, fx.tree, fx.catalog, outcome, 1.0, 10.0, 0.1);

  CHECK(user.receptive_field == std::vector<NodeId>({1, 3, 6, 7}));
  CHECK(user.stats.find(2) == user.stats.end());
  CHECK(user.stats[6].select_count == 0);  // children start from zero

  // A chosen leaf never alters the field.
  PolicyOutcome leaf_outcome;
  leaf_outcome.node_path = {6};
  leaf_outcome.chosen_item = 104;
  for (int i = 0; i < 100; ++i) phcb_update(user, fx.tree, fx.catalog, leaf_outcome, 1.0, 10.0, 0.1);
  CHECK(user.receptive_field == std::vector<NodeId>({1, 3, 6, 7}));
}

TEST_CASE("phcb field refines monotonically and keeps the partition") {
  auto items = random_unit_items(200, 8, 14);
  HierarchyTree tree = build_tree(items, {1, 5, 40}, 100, 15);
  ItemCatalog catalog(items);
  PhcbUserState user(8, 0);
  Rng rng(16);
  std::set<NodeId> retired;

  for (int t = 0; t < 2000; ++t) {
    PolicyOutcome out =
        phcb_select(user, tree, catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng);
    std::vector<NodeId> before = user.receptive_field;
    phcb_update(user, tree, catalog, out, rng.uniform() < 0.6 ? 1.0 : 0.0, 10.0, 0.1);
    check_field_partition(user, tree);
    for (NodeId id : user.receptive_field) CHECK(retired.count(id) == 0);
    if (user.receptive_field != before) retired.insert(out.node_path[0]);
  }
  CHECK(!retired.empty());  // positive rewards must have triggered expansions
}

TEST_CASE("flat select scores exactly min(budget, catalog size)") {
  auto items = random_unit_items(1000, 8, 17);
  ItemCatalog catalog(items);
  RidgeState state(8);
  Rng rng(18);
  BudgetLedger ledger(50);
  ledger.begin_round();
  PolicyOutcome out =
      flat_select(state, catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng, &ledger);
  CHECK(out.scores_charged == 50);
  CHECK(out.node_path.empty());
  CHECK(catalog.contains(out.chosen_item));

  auto few = random_unit_items(30, 8, 19);
  ItemCatalog small(few);
  ledger.begin_round();
  out = flat_select(state, small, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng, &ledger);
  CHECK(out.scores_charged == 30);
}

TEST_CASE("two-stage baseline on a singleton-leaf tree sees every item as a leaf arm") {
  auto items = random_unit_items(20, 8, 20);
  HierarchyTree tree = build_tree(items, {1, 20}, 100, 21);
  ItemCatalog catalog(items);
  TwoStageUserState user(8);
  Rng rng(22);
  BudgetLedger ledger(50);
  ledger.begin_round();
  PolicyOutcome out =
      two_stage_select(user, tree, catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng, &ledger);
  // Leaf stage saw all 20 singleton leaves; item stage is forced.
  CHECK(out.stage_scores[0] == 20);
  CHECK(out.stage_scores[1] == 1);
  CHECK(tree.item_closure(out.node_path[0])[0] == out.chosen_item);
  two_stage_update(user, tree, catalog, out, 1.0);
  CHECK(user.node_state.update_count() == 1);
  CHECK(user.item_state.update_count() == 1);
}

TEST_CASE("category baseline with one category reduces to a flat item bandit") {
  auto items = random_unit_items(40, 8, 23);
  std::map<ItemId, std::string> labels;
  for (const auto& e : items) labels[e.item_id] = "all";
  HierarchyTree cat_tree = build_category_grouping(items, labels);
  ItemCatalog catalog(items);
  TwoStageUserState user(8);
  Rng rng(24);
  PolicyOutcome out =
      cb_category_select(user, cat_tree, catalog, {EstimatorKind::LinUcb, 0.5, 0, 0}, 50, rng);
  CHECK(out.node_path.size() == 1);
  CHECK(out.stage_scores[0] == 1);   // single category arm
  CHECK(out.stage_scores[1] == 25);  // half the budget on items
  CHECK(catalog.contains(out.chosen_item));
}
