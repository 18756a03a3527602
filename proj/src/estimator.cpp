#include "treebandit/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "treebandit/errors.hpp"

namespace treebandit {

EstimatorKind estimator_kind_from(const std::string& name) {
  if (name == "linucb") return EstimatorKind::LinUcb;
  if (name == "thompson") return EstimatorKind::Thompson;
  if (name == "epsgreedy") return EstimatorKind::EpsGreedy;
  throw ConfigError("unknown estimator '" + name + "' (expected linucb|thompson|epsgreedy)");
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::LinUcb: return "linucb";
    case EstimatorKind::Thompson: return "thompson";
    case EstimatorKind::EpsGreedy: return "epsgreedy";
  }
  return "?";
}

void BudgetLedger::charge(int scores) {
  if (spent_ + scores > budget_)
    throw InternalError("BudgetLedger: overspend (" + std::to_string(spent_ + scores) + " > " +
                        std::to_string(budget_) + ")");
  spent_ += scores;
}

std::vector<Arm> sample_candidates(const std::vector<Arm>& arms, int budget, Rng& rng) {
  if (arms.empty()) throw std::invalid_argument("sample_candidates: empty arm list");
  if (budget < 1) throw std::invalid_argument("sample_candidates: budget must be >= 1");
  if (arms.size() <= static_cast<std::size_t>(budget)) return arms;
  std::vector<std::size_t> idx = rng.sample_indices(arms.size(), static_cast<std::size_t>(budget));
  std::vector<Arm> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(arms[i]);
  return out;
}

double ucb_score(const RidgeState& state, const Vec& x, double alpha) {
  double width_sq = state.quadratic_form(x);
  return state.predict(x) + alpha * std::sqrt(width_sq > 0.0 ? width_sq : 0.0);
}

Vec thompson_draw(const RidgeState& state, double v, Rng& rng) {
  if (v == 0.0) return state.theta();
  Eigen::LLT<Mat> llt(state.a_inv());
  Vec z(state.dim());
  for (int i = 0; i < state.dim(); ++i) z[i] = rng.normal();
  Vec scaled = llt.matrixL() * z;
  return state.theta() + v * scaled;
}

namespace {

// Argmax with ties broken by the lowest arm id.
template <typename Score>
std::uint64_t argmax_arm(const std::vector<Arm>& candidates, Score score) {
  std::uint64_t best_id = candidates[0].id;
  double best = score(candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    double s = score(candidates[i]);
    if (s > best || (s == best && candidates[i].id < best_id)) {
      best = s;
      best_id = candidates[i].id;
    }
  }
  return best_id;
}

}  // namespace

std::uint64_t select(const RidgeState& state, const EstimatorConfig& config,
                     const std::vector<Arm>& candidates, Rng& rng, BudgetLedger* ledger) {
  if (candidates.empty()) throw std::invalid_argument("select: empty candidate list");
  const int n = static_cast<int>(candidates.size());

  switch (config.kind) {
    case EstimatorKind::LinUcb:
      if (ledger) ledger->charge(n);
      return argmax_arm(candidates,
                        [&](const Arm& a) { return ucb_score(state, *a.feature, config.alpha); });

    case EstimatorKind::Thompson: {
      Vec sample = thompson_draw(state, config.v, rng);
      if (ledger) ledger->charge(n);
      return argmax_arm(candidates, [&](const Arm& a) { return sample.dot(*a.feature); });
    }

    case EstimatorKind::EpsGreedy:
      if (rng.uniform() < config.epsilon) {
        return candidates[rng.uniform_int(candidates.size())].id;  // no scores computed
      }
      if (ledger) ledger->charge(n);
      return argmax_arm(candidates, [&](const Arm& a) { return state.predict(*a.feature); });
  }
  throw InternalError("select: unreachable estimator kind");
}

void update(RidgeState& state, const Arm& chosen, double reward) {
  state.update(*chosen.feature, reward);
}

}  // namespace treebandit
