#pragma once

#include <unordered_map>
#include <vector>

#include "treebandit/catalog.hpp"
#include "treebandit/estimator.hpp"
#include "treebandit/tree.hpp"

namespace treebandit {

// What one user-round decision produced. node_path is the root-to-leaf path
// for the descent policy, the single chosen node for receptive-field and
// two-stage policies, and empty for the flat policy.
struct PolicyOutcome {
  ItemId chosen_item = 0;
  std::vector<NodeId> node_path;
  int scores_charged = 0;
  std::vector<int> stage_scores;  // per decision stage, for budget audits
};

// ---------------------------------------------------------------------------
// HCB: sequential root-to-leaf descent with one estimator per tree level.
// ---------------------------------------------------------------------------

struct HcbUserState {
  // states[0] scores item arms, states[l] scores the level-l node choice.
  std::vector<RidgeState> states;

  HcbUserState(int dim, int depth);
};

// Walks from the root through depth() child selections, then picks an item
// inside the reached leaf. The score budget is split evenly across the
// depth()+1 decisions (remainder dropped); oversized candidate sets are
// subsampled. Requires budget >= depth()+1.
PolicyOutcome hcb_select(HcbUserState& user, const HierarchyTree& tree, const ItemCatalog& catalog,
                         const EstimatorConfig& config, int budget, Rng& rng,
                         BudgetLedger* ledger = nullptr);

// Back-propagates the reward: one rank-1 update per path level with the node
// feature, plus one on the item state with the chosen item's feature.
void hcb_update(HcbUserState& user, const HierarchyTree& tree, const ItemCatalog& catalog,
                const PolicyOutcome& outcome, double reward);

// ---------------------------------------------------------------------------
// pHCB: bandit over a progressively expanding receptive field of nodes.
// ---------------------------------------------------------------------------

struct NodeStats {
  std::uint64_t select_count = 0;
  double reward_sum = 0.0;
};

struct PhcbUserState {
  std::vector<NodeId> receptive_field;  // sorted; starts as {root}
  RidgeState node_state;                // one estimator across all visible nodes
  RidgeState item_state;
  std::unordered_map<NodeId, NodeStats> stats;

  PhcbUserState(int dim, NodeId root_id);
};

// Expansion rule for a node whose 1-indexed level is `level` (the root sits
// at level 1): expand once the node has been selected at least
// floor(q * ln(level)) times (and at least once) and its average reward
// strictly exceeds p * ln(level).
bool check_expansion(const NodeStats& stats, int level, double q, double p);

// One node choice over the receptive field, then one item choice inside the
// chosen node's item closure; each stage gets floor(budget / 2) candidates.
PolicyOutcome phcb_select(PhcbUserState& user, const HierarchyTree& tree,
                          const ItemCatalog& catalog, const EstimatorConfig& config, int budget,
                          Rng& rng, BudgetLedger* ledger = nullptr);

// Updates both estimators and the chosen node's stats, then replaces the node
// with its children when the expansion rule fires (leaves never expand).
void phcb_update(PhcbUserState& user, const HierarchyTree& tree, const ItemCatalog& catalog,
                 const PolicyOutcome& outcome, double reward, double q, double p);

// ---------------------------------------------------------------------------
// Baselines: flat bandit over all items; two-stage bandit over a grouping.
// ---------------------------------------------------------------------------

struct TwoStageUserState {
  RidgeState node_state;
  RidgeState item_state;

  explicit TwoStageUserState(int dim) : node_state(dim), item_state(dim) {}
};

// Single bandit over the whole catalog, budget-sampled.
PolicyOutcome flat_select(RidgeState& state, const ItemCatalog& catalog,
                          const EstimatorConfig& config, int budget, Rng& rng,
                          BudgetLedger* ledger = nullptr);
void flat_update(RidgeState& state, const ItemCatalog& catalog, const PolicyOutcome& outcome,
                 double reward);

// Leaf arm then item arm over `tree`'s deepest level; serves both the
// cluster-leaf baseline (the k-means tree) and the category baseline (the
// label grouping) depending on which tree is passed.
PolicyOutcome two_stage_select(TwoStageUserState& user, const HierarchyTree& tree,
                               const ItemCatalog& catalog, const EstimatorConfig& config,
                               int budget, Rng& rng, BudgetLedger* ledger = nullptr);
void two_stage_update(TwoStageUserState& user, const HierarchyTree& tree,
                      const ItemCatalog& catalog, const PolicyOutcome& outcome, double reward);

inline PolicyOutcome cb_leaf_select(TwoStageUserState& user, const HierarchyTree& tree,
                                    const ItemCatalog& catalog, const EstimatorConfig& config,
                                    int budget, Rng& rng, BudgetLedger* ledger = nullptr) {
  return two_stage_select(user, tree, catalog, config, budget, rng, ledger);
}

inline PolicyOutcome cb_category_select(TwoStageUserState& user, const HierarchyTree& category_tree,
                                        const ItemCatalog& catalog, const EstimatorConfig& config,
                                        int budget, Rng& rng, BudgetLedger* ledger = nullptr) {
  return two_stage_select(user, category_tree, catalog, config, budget, rng, ledger);
}

}  // namespace treebandit
