#pragma once

#include <vector>

#include "treebandit/rng.hpp"
#include "treebandit/types.hpp"

namespace treebandit {

struct KMeansResult {
  std::vector<int> assignment;        // point index -> cluster index
  std::vector<Vec> centroids;         // exactly k, all non-empty, means of members
  double inertia = 0.0;               // sum of squared distances to assigned centroid
  std::vector<double> inertia_trace;  // one entry per iteration, non-increasing
  int iterations = 0;                 // Lloyd iterations performed
};

// Lloyd's algorithm with k-means++ seeding, Euclidean distance.
// Deterministic given the rng state. Nearest-centroid ties go to the lowest
// centroid index. Emptied clusters are repaired by moving in the point
// currently farthest from its own centroid, so exactly k clusters survive.
// Stops when no assignment changes or after max_iter iterations.
KMeansResult kmeans(const std::vector<Vec>& points, int k, int max_iter, Rng& rng);

}  // namespace treebandit
