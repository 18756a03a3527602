#pragma once

#include <cstdint>

#include "treebandit/types.hpp"

namespace treebandit {

// Online ridge-regression state for one linear bandit estimator:
// the Gram matrix A = I + sum(x x^T) is never stored, only its inverse,
// maintained exactly (up to rounding) via the Sherman-Morrison identity
//
//   (A + x x^T)^-1 = A^-1 - (A^-1 x)(A^-1 x)^T / (1 + x^T A^-1 x)
//
// so that scoring stays O(d^2) per arm. b accumulates reward-weighted
// features and theta = A^-1 b is kept in sync after every update.
class RidgeState {
public:
  explicit RidgeState(int dim);

  int dim() const { return static_cast<int>(b_.size()); }
  const Mat& a_inv() const { return a_inv_; }
  const Vec& b() const { return b_; }
  const Vec& theta() const { return theta_; }
  std::uint64_t update_count() const { return update_count_; }

  // Rank-1 observation (x, reward). Rejects non-finite features.
  void update(const Vec& x, double reward);

  // x^T A^-1 x, the squared confidence width. Non-negative while A^-1 is SPD.
  double quadratic_form(const Vec& x) const;

  // theta^T x, the point estimate of the expected reward.
  double predict(const Vec& x) const;

private:
  Mat a_inv_;
  Vec b_;
  Vec theta_;
  Vec scratch_;  // holds A^-1 x during update
  std::uint64_t update_count_ = 0;
};

}  // namespace treebandit
