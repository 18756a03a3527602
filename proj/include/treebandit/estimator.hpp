#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treebandit/ridge.hpp"
#include "treebandit/rng.hpp"

namespace treebandit {

// One selectable option: a tree node or an item. Features are borrowed from
// the tree / item catalog and must outlive the call.
struct Arm {
  std::uint64_t id = 0;
  const Vec* feature = nullptr;
};

enum class EstimatorKind { LinUcb, Thompson, EpsGreedy };

EstimatorKind estimator_kind_from(const std::string& name);  // throws ConfigError
std::string to_string(EstimatorKind kind);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::LinUcb;
  double alpha = 0.5;     // LinUCB confidence width scale
  double v = 0.1;         // Thompson posterior scale
  double epsilon = 0.05;  // eps-greedy exploration probability
};

// Per-round cap on reward-score computations. One charge per candidate scored.
class BudgetLedger {
public:
  explicit BudgetLedger(int budget_per_round) : budget_(budget_per_round) {}

  void begin_round() { spent_ = 0; }
  void charge(int scores);  // throws InternalError if the cap would be exceeded
  int spent() const { return spent_; }
  int budget() const { return budget_; }

private:
  int budget_ = 0;
  int spent_ = 0;
};

// Uniform subset of exactly min(budget, |arms|) arms, no duplicates.
std::vector<Arm> sample_candidates(const std::vector<Arm>& arms, int budget, Rng& rng);

// LinUCB score: theta^T x + alpha * sqrt(x^T A^-1 x).
double ucb_score(const RidgeState& state, const Vec& x, double alpha);

// One posterior sample theta + v * chol(A^-1) z, z ~ N(0, I).
Vec thompson_draw(const RidgeState& state, double v, Rng& rng);

// Picks an arm id from the candidates. Ties go to the lowest arm id. Scores
// are charged to the ledger (if given) per candidate actually scored; the
// eps-greedy exploration branch scores nothing.
std::uint64_t select(const RidgeState& state, const EstimatorConfig& config,
                     const std::vector<Arm>& candidates, Rng& rng,
                     BudgetLedger* ledger = nullptr);

// Observation update for the chosen arm; delegates to RidgeState::update.
void update(RidgeState& state, const Arm& chosen, double reward);

}  // namespace treebandit
