#include "treebandit/kmeans.hpp"

#include <limits>
#include <stdexcept>

#include "treebandit/errors.hpp"

namespace treebandit {

namespace {

// k-means++ seeding: first centroid uniform, the rest D^2-weighted.
std::vector<int> seed_plus_plus(const Mat& x, const Vec& sq_norms, int k, Rng& rng) {
  const int n = static_cast<int>(x.rows());
  std::vector<int> seeds(k);
  seeds[0] = static_cast<int>(rng.uniform_int(n));

  Vec d2 = Vec::Constant(n, std::numeric_limits<double>::infinity());
  Vec cum(n);
  for (int c = 1; c < k; ++c) {
    const auto prev = x.row(seeds[c - 1]);
    double prev_norm = sq_norms[seeds[c - 1]];
    for (int i = 0; i < n; ++i) {
      double d = sq_norms[i] + prev_norm - 2.0 * prev.dot(x.row(i));
      if (d < d2[i]) d2[i] = d < 0.0 ? 0.0 : d;
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      total += d2[i];
      cum[i] = total;
    }
    if (total <= 0.0) {
      // All remaining points coincide with chosen seeds; fall back to uniform.
      seeds[c] = static_cast<int>(rng.uniform_int(n));
      continue;
    }
    double u = rng.uniform() * total;
    int pick = static_cast<int>(std::lower_bound(cum.data(), cum.data() + n, u) - cum.data());
    if (pick >= n) pick = n - 1;
    seeds[c] = pick;
  }
  return seeds;
}

}  // namespace

KMeansResult kmeans(const std::vector<Vec>& points, int k, int max_iter, Rng& rng) {
  const int n = static_cast<int>(points.size());
  if (n == 0) throw std::invalid_argument("kmeans: empty point list");
  if (k < 1 || k > n) throw std::invalid_argument("kmeans: k must be in [1, |points|]");
  if (max_iter < 1) throw std::invalid_argument("kmeans: max_iter must be >= 1");

  const int d = static_cast<int>(points[0].size());
  Mat x(n, d);
  for (int i = 0; i < n; ++i) {
    if (points[i].size() != d) throw std::invalid_argument("kmeans: ragged point dimensions");
    x.row(i) = points[i];
  }
  Vec sq_norms = x.rowwise().squaredNorm();

  Mat centroids(k, d);
  {
    std::vector<int> seeds = seed_plus_plus(x, sq_norms, k, rng);
    for (int c = 0; c < k; ++c) centroids.row(c) = x.row(seeds[c]);
  }

  KMeansResult res;
  res.assignment.assign(n, -1);
  std::vector<int> counts(k, 0);
  Mat scores(n, k);  // ||x_i - c_j||^2 - ||x_i||^2, enough for argmin
  Vec dist_to_own(n);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment via one GEMM: score(i,j) = ||c_j||^2 - 2 x_i . c_j.
    Vec cnorm = centroids.rowwise().squaredNorm();
    scores.noalias() = x * centroids.transpose() * -2.0;
    scores.rowwise() += cnorm.transpose();

    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_score = scores(i, 0);
      for (int j = 1; j < k; ++j) {
        if (scores(i, j) < best_score) {  // strict: ties keep the lowest index
          best_score = scores(i, j);
          best = j;
        }
      }
      if (res.assignment[i] != best) {
        res.assignment[i] = best;
        changed = true;
      }
      double dsq = sq_norms[i] + best_score;
      dist_to_own[i] = dsq > 0.0 ? dsq : 0.0;
    }
    res.inertia_trace.push_back(dist_to_own.sum());

    // Centroid update.
    centroids.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      centroids.row(res.assignment[i]) += x.row(i);
      ++counts[res.assignment[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        centroids.row(c) /= static_cast<double>(counts[c]);
        continue;
      }
      // Empty-cluster repair: promote the farthest point to a singleton.
      int victim = -1;
      double worst = -1.0;
      for (int i = 0; i < n; ++i) {
        if (counts[res.assignment[i]] <= 1) continue;  // keep donor non-empty
        if (dist_to_own[i] > worst) {
          worst = dist_to_own[i];
          victim = i;
        }
      }
      if (victim < 0) throw InternalError("kmeans: empty-cluster repair found no donor");
      --counts[res.assignment[victim]];
      res.assignment[victim] = c;
      counts[c] = 1;
      centroids.row(c) = x.row(victim);
      dist_to_own[victim] = 0.0;
      changed = true;
    }

    res.iterations = iter + 1;
    if (!changed) break;
  }

  // Recompute means of the final assignment so repaired clusters report exact
  // means, then measure inertia against them.
  centroids.setZero();
  std::fill(counts.begin(), counts.end(), 0);
  for (int i = 0; i < n; ++i) {
    centroids.row(res.assignment[i]) += x.row(i);
    ++counts[res.assignment[i]];
  }
  for (int c = 0; c < k; ++c) centroids.row(c) /= static_cast<double>(counts[c]);
  res.inertia = 0.0;
  for (int i = 0; i < n; ++i)
    res.inertia += (x.row(i) - centroids.row(res.assignment[i])).squaredNorm();

  res.centroids.resize(k);
  for (int c = 0; c < k; ++c) res.centroids[c] = centroids.row(c).transpose();
  return res;
}

}  // namespace treebandit
