#include "treebandit/ridge.hpp"

#include <stdexcept>

namespace treebandit {

RidgeState::RidgeState(int dim) {
  if (dim < 1) throw std::invalid_argument("RidgeState: dimension must be >= 1");
  a_inv_ = Mat::Identity(dim, dim);
  b_ = Vec::Zero(dim);
  theta_ = Vec::Zero(dim);
  scratch_ = Vec::Zero(dim);
}

void RidgeState::update(const Vec& x, double reward) {
  if (x.size() != b_.size()) throw std::invalid_argument("RidgeState::update: dimension mismatch");
  if (!x.allFinite()) throw std::invalid_argument("RidgeState::update: non-finite feature entry");

  scratch_.noalias() = a_inv_ * x;
  double denom = 1.0 + x.dot(scratch_);  // >= 1 while a_inv is SPD
  a_inv_.noalias() -= (scratch_ * scratch_.transpose()) / denom;
  b_ += reward * x;
  theta_.noalias() = a_inv_ * b_;
  ++update_count_;
}

double RidgeState::quadratic_form(const Vec& x) const {
  if (x.size() != b_.size())
    throw std::invalid_argument("RidgeState::quadratic_form: dimension mismatch");
  // Row-wise accumulation avoids a heap temporary; this is the hot path.
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += x[i] * a_inv_.row(i).dot(x);
  return acc;
}

double RidgeState::predict(const Vec& x) const {
  if (x.size() != b_.size()) throw std::invalid_argument("RidgeState::predict: dimension mismatch");
  return theta_.dot(x);
}

}  // namespace treebandit
