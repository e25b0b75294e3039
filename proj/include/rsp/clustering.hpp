#pragma once

#include "rsp/matrix.hpp"
#include "rsp/sensing.hpp"
#include "rsp/solver.hpp"

#include <cstdint>
#include <vector>

namespace rsp {

struct KMeansParams {
  int restarts = 10;
  int max_iters = 300;
  double tol = 1e-9;  // on centroid movement between Lloyd passes
};

struct ClusterAssignment {
  std::vector<int> labels;  // one entry per row of the input
  Matrix centroids;         // k x dim
  double inertia = 0.0;     // sum of squared distances to assigned centroids
  int restarts_used = 0;
};

/// Lloyd's algorithm over the rows of `points` with k-means++ seeding and
/// multiple restarts; the best (lowest-inertia) run wins. Empty clusters are
/// refilled with the point farthest from its centroid. Deterministic given
/// the seed.
ClusterAssignment kmeans(const Matrix& points, int k, std::uint64_t seed,
                         const KMeansParams& params = {});

/// Fraction of points whose predicted cluster matches the ground truth under
/// the best one-to-one relabeling (Hungarian assignment on the confusion
/// matrix). Labels must be non-negative and the two vectors equally long.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

/// Minimum-cost perfect assignment on a square cost matrix; returns for each
/// row the column it is matched to. O(n^3) Kuhn-Munkres with potentials.
std::vector<int> min_cost_assignment(const Matrix& cost);

/// End-to-end pipeline on compressed data: optionally normalize columns of M
/// to unit norm, recover the row space, then cluster its rows.
ClusterAssignment cluster_compressed(const Matrix& m_mat, const SensingMatrix& sensing,
                                     int k, const RspParams& params, bool normalize,
                                     std::uint64_t seed);

}  // namespace rsp
