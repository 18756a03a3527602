#include "treebandit/policies.hpp"

#include <algorithm>
#include <cmath>

#include "treebandit/errors.hpp"

namespace treebandit {

namespace {

// Builds a budget-limited candidate list without materializing the full arm
// universe: samples indices first, then resolves features.
std::vector<Arm> sample_node_arms(const HierarchyTree& tree, const std::vector<NodeId>& ids,
                                  int budget, Rng& rng) {
  std::vector<std::size_t> idx = rng.sample_indices(ids.size(), static_cast<std::size_t>(budget));
  std::vector<Arm> arms;
  arms.reserve(idx.size());
  for (std::size_t i : idx) {
    const TreeNode& nd = tree.node(ids[i]);
    arms.push_back({static_cast<std::uint64_t>(nd.node_id), &nd.feature});
  }
  return arms;
}

std::vector<Arm> sample_item_arms(const ItemCatalog& catalog, const std::vector<ItemId>& ids,
                                  int budget, Rng& rng) {
  std::vector<std::size_t> idx = rng.sample_indices(ids.size(), static_cast<std::size_t>(budget));
  std::vector<Arm> arms;
  arms.reserve(idx.size());
  for (std::size_t i : idx) arms.push_back({ids[i], &catalog.feature(ids[i])});
  return arms;
}

int record_stage(PolicyOutcome& out, BudgetLedger* ledger, int spent_before) {
  int spent = ledger ? ledger->spent() - spent_before : 0;
  out.stage_scores.push_back(spent);
  out.scores_charged += spent;
  return ledger ? ledger->spent() : 0;
}

}  // namespace

// --------------------------------------------------------------------------
// HCB
// --------------------------------------------------------------------------

HcbUserState::HcbUserState(int dim, int depth) {
  if (depth < 1) throw std::invalid_argument("HcbUserState: tree depth must be >= 1");
  states.reserve(depth + 1);
  for (int l = 0; l <= depth; ++l) states.emplace_back(dim);
}

PolicyOutcome hcb_select(HcbUserState& user, const HierarchyTree& tree, const ItemCatalog& catalog,
                         const EstimatorConfig& config, int budget, Rng& rng,
                         BudgetLedger* ledger) {
  const int L = tree.depth();
  if (static_cast<int>(user.states.size()) != L + 1)
    throw InternalError("hcb_select: user state depth does not match tree");
  const int stages = L + 1;
  if (budget < stages)
    throw std::invalid_argument("hcb_select: budget must cover one score per decision");
  const int per_stage = budget / stages;
  BudgetLedger local(budget);
  if (ledger == nullptr) {
    local.begin_round();
    ledger = &local;
  }

  PolicyOutcome out;
  int spent_mark = ledger ? ledger->spent() : 0;
  const TreeNode* current = &tree.root();
  out.node_path.push_back(current->node_id);
  for (int l = 1; l <= L; ++l) {
    std::vector<Arm> cand = sample_node_arms(tree, current->children_ids, per_stage, rng);
    std::uint64_t chosen = select(user.states[l], config, cand, rng, ledger);
    spent_mark = record_stage(out, ledger, spent_mark);
    current = &tree.node(static_cast<NodeId>(chosen));
    out.node_path.push_back(current->node_id);
  }

  if (current->item_ids.empty())
    throw InternalError("hcb_select: reached leaf " + std::to_string(current->node_id) +
                        " with no items");
  std::vector<Arm> cand = sample_item_arms(catalog, current->item_ids, per_stage, rng);
  out.chosen_item = select(user.states[0], config, cand, rng, ledger);
  record_stage(out, ledger, spent_mark);
  return out;
}

void hcb_update(HcbUserState& user, const HierarchyTree& tree, const ItemCatalog& catalog,
                const PolicyOutcome& outcome, double reward) {
  const int L = tree.depth();
  if (static_cast<int>(outcome.node_path.size()) != L + 1)
    throw InternalError("hcb_update: path length does not match tree depth");
  for (int l = 1; l <= L; ++l) {
    const TreeNode& nd = tree.node(outcome.node_path[l]);
    if (nd.level != l) throw InternalError("hcb_update: path node level mismatch");
    user.states[l].update(nd.feature, reward);
  }
  user.states[0].update(catalog.feature(outcome.chosen_item), reward);
}

// --------------------------------------------------------------------------
// pHCB
// --------------------------------------------------------------------------

PhcbUserState::PhcbUserState(int dim, NodeId root_id)
    : receptive_field{root_id}, node_state(dim), item_state(dim) {}

bool check_expansion(const NodeStats& stats, int level, double q, double p) {
  if (level < 1) throw std::invalid_argument("check_expansion: level must be >= 1");
  if (stats.select_count == 0) return false;
  double log_level = std::log(static_cast<double>(level));
  auto needed = static_cast<std::uint64_t>(std::floor(q * log_level));
  if (stats.select_count < needed) return false;
  double avg = stats.reward_sum / static_cast<double>(stats.select_count);
  return avg > p * log_level;
}

PolicyOutcome phcb_select(PhcbUserState& user, const HierarchyTree& tree,
                          const ItemCatalog& catalog, const EstimatorConfig& config, int budget,
                          Rng& rng, BudgetLedger* ledger) {
  if (user.receptive_field.empty()) throw InternalError("phcb_select: empty receptive field");
  if (budget < 2) throw std::invalid_argument("phcb_select: budget must cover both stages");
  const int per_stage = budget / 2;
  BudgetLedger local(budget);
  if (ledger == nullptr) {
    local.begin_round();
    ledger = &local;
  }

  PolicyOutcome out;
  int spent_mark = ledger ? ledger->spent() : 0;

  std::vector<Arm> node_cand = sample_node_arms(tree, user.receptive_field, per_stage, rng);
  auto chosen_node = static_cast<NodeId>(select(user.node_state, config, node_cand, rng, ledger));
  spent_mark = record_stage(out, ledger, spent_mark);
  out.node_path.push_back(chosen_node);

  const std::vector<ItemId>& closure = tree.item_closure(chosen_node);
  if (closure.empty())
    throw InternalError("phcb_select: node " + std::to_string(chosen_node) + " has no items");
  std::vector<Arm> item_cand = sample_item_arms(catalog, closure, per_stage, rng);
  out.chosen_item = select(user.item_state, config, item_cand, rng, ledger);
  record_stage(out, ledger, spent_mark);
  return out;
}

void phcb_update(PhcbUserState& user, const HierarchyTree& tree, const ItemCatalog& catalog,
                 const PolicyOutcome& outcome, double reward, double q, double p) {
  if (outcome.node_path.size() != 1) throw InternalError("phcb_update: expected one chosen node");
  const TreeNode& nd = tree.node(outcome.node_path[0]);
  user.node_state.update(nd.feature, reward);
  user.item_state.update(catalog.feature(outcome.chosen_item), reward);

  NodeStats& st = user.stats[nd.node_id];
  ++st.select_count;
  st.reward_sum += reward;

  // Expansion levels are 1-indexed: the root (tree level 0) sits at level 1,
  // making it the easiest node to expand.
  if (!nd.is_leaf() && check_expansion(st, nd.level + 1, q, p)) {
    auto& field = user.receptive_field;
    field.erase(std::find(field.begin(), field.end(), nd.node_id));
    field.insert(field.end(), nd.children_ids.begin(), nd.children_ids.end());
    std::sort(field.begin(), field.end());
    user.stats.erase(nd.node_id);
  }
}

// --------------------------------------------------------------------------
// Baselines
// --------------------------------------------------------------------------

PolicyOutcome flat_select(RidgeState& state, const ItemCatalog& catalog,
                          const EstimatorConfig& config, int budget, Rng& rng,
                          BudgetLedger* ledger) {
  if (catalog.size() == 0) throw std::invalid_argument("flat_select: empty catalog");
  if (budget < 1) throw std::invalid_argument("flat_select: budget must be >= 1");
  BudgetLedger local(budget);
  if (ledger == nullptr) {
    local.begin_round();
    ledger = &local;
  }

  PolicyOutcome out;
  int spent_mark = ledger ? ledger->spent() : 0;
  std::vector<std::size_t> idx =
      rng.sample_indices(catalog.size(), static_cast<std::size_t>(budget));
  std::vector<Arm> cand;
  cand.reserve(idx.size());
  for (std::size_t i : idx) {
    const ItemEmbedding& e = catalog.items()[i];
    cand.push_back({e.item_id, &e.vector});
  }
  out.chosen_item = select(state, config, cand, rng, ledger);
  record_stage(out, ledger, spent_mark);
  return out;
}

void flat_update(RidgeState& state, const ItemCatalog& catalog, const PolicyOutcome& outcome,
                 double reward) {
  state.update(catalog.feature(outcome.chosen_item), reward);
}

PolicyOutcome two_stage_select(TwoStageUserState& user, const HierarchyTree& tree,
                               const ItemCatalog& catalog, const EstimatorConfig& config,
                               int budget, Rng& rng, BudgetLedger* ledger) {
  if (budget < 2) throw std::invalid_argument("two_stage_select: budget must cover both stages");
  const int per_stage = budget / 2;
  BudgetLedger local(budget);
  if (ledger == nullptr) {
    local.begin_round();
    ledger = &local;
  }

  PolicyOutcome out;
  int spent_mark = ledger ? ledger->spent() : 0;
  const std::vector<NodeId>& leaves = tree.level_nodes(tree.depth());
  std::vector<Arm> node_cand = sample_node_arms(tree, leaves, per_stage, rng);
  auto chosen_node = static_cast<NodeId>(select(user.node_state, config, node_cand, rng, ledger));
  spent_mark = record_stage(out, ledger, spent_mark);
  out.node_path.push_back(chosen_node);

  const std::vector<ItemId>& items = tree.item_closure(chosen_node);
  if (items.empty())
    throw InternalError("two_stage_select: leaf " + std::to_string(chosen_node) + " has no items");
  std::vector<Arm> item_cand = sample_item_arms(catalog, items, per_stage, rng);
  out.chosen_item = select(user.item_state, config, item_cand, rng, ledger);
  record_stage(out, ledger, spent_mark);
  return out;
}

void two_stage_update(TwoStageUserState& user, const HierarchyTree& tree,
                      const ItemCatalog& catalog, const PolicyOutcome& outcome, double reward) {
  if (outcome.node_path.size() != 1)
    throw InternalError("two_stage_update: expected one chosen node");
  user.node_state.update(tree.node(outcome.node_path[0]).feature, reward);
  user.item_state.update(catalog.feature(outcome.chosen_item), reward);
}

}  // namespace treebandit
