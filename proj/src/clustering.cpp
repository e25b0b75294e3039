#include "rsp/clustering.hpp"

#include "rsp/rng.hpp"

#include <algorithm>
#include <limits>

namespace rsp {

namespace {

// Squared distance from every row of `points` to every centroid row.
Matrix squared_distances(const Matrix& points, const Matrix& centroids) {
  const Vector pn = points.rowwise().squaredNorm();
  const Vector cn = centroids.rowwise().squaredNorm();
  Matrix d = -2.0 * points * centroids.transpose();
  d.colwise() += pn;
  d.rowwise() += cn.transpose();
  return d.cwiseMax(0.0);  // clamp the tiny negatives from cancellation
}

Matrix seed_plus_plus(const Matrix& points, int k, Rng& rng) {
  const Index n = points.rows();
  Matrix centroids(k, points.cols());
  centroids.row(0) = points.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  Vector d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      // Sample proportionally to squared distance from the chosen set.
      const double target = rng.uniform() * total;
      double cum = 0.0;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        cum += d2[i];
        if (cum > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centroids.row(c) = points.row(pick);
    d2 = d2.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

ClusterAssignment lloyd_once(const Matrix& points, int k, Rng& rng, const KMeansParams& params) {
  const Index n = points.rows();
  Matrix centroids = seed_plus_plus(points, k, rng);
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);

  for (int it = 0; it < params.max_iters; ++it) {
    const Matrix d2 = squared_distances(points, centroids);
    std::fill(counts.begin(), counts.end(), Index{0});
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      d2.row(i).minCoeff(&best);
      labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
      ++counts[static_cast<std::size_t>(best)];
    }

    // Re-seed any empty cluster with the point farthest from its centroid,
    // taken from a cluster that can spare one.
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Index far = -1;
      double far_d = -1.0;
      for (Index i = 0; i < n; ++i) {
        const int owner = labels[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(owner)] < 2) continue;
        const double di = d2(i, owner);
        if (di > far_d) {
          far_d = di;
          far = i;
        }
      }
      if (far < 0) continue;  // fewer distinct points than clusters
      --counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      centroids.row(c) = points.row(far);
    }

    Matrix next = Matrix::Zero(k, points.cols());
    for (Index i = 0; i < n; ++i) next.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        next.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        next.row(c) = centroids.row(c);
      }
    }
    const double moved = (next - centroids).rowwise().norm().maxCoeff();
    centroids = std::move(next);
    if (moved < params.tol) break;
  }

  ClusterAssignment out;
  out.centroids = centroids;
  out.labels = std::move(labels);
  const Matrix d2 = squared_distances(points, out.centroids);
  out.inertia = 0.0;
  for (Index i = 0; i < n; ++i) out.inertia += d2(i, out.labels[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

ClusterAssignment kmeans(const Matrix& points, int k, std::uint64_t seed,
                         const KMeansParams& params) {
  if (points.rows() < 1 || points.cols() < 1) {
    throw std::invalid_argument("kmeans: points matrix must be non-empty");
  }
  require_finite(points, "kmeans");
  if (k < 1 || k > points.rows()) {
    throw std::invalid_argument("kmeans: k must be in [1, " + std::to_string(points.rows()) + "]");
  }
  if (params.restarts < 1 || params.max_iters < 1 || !(params.tol >= 0.0)) {
    throw std::invalid_argument("kmeans: restarts and max_iters must be positive, tol >= 0");
  }

  ClusterAssignment best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int rs = 0; rs < params.restarts; ++rs) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rs), 0x6B6DULL));
    ClusterAssignment cur = lloyd_once(points, k, rng, params);
    if (cur.inertia < best_inertia) {
      best_inertia = cur.inertia;
      best = std::move(cur);
    }
  }
  best.restarts_used = params.restarts;
  return best;
}

std::vector<int> min_cost_assignment(const Matrix& cost) {
  if (cost.rows() != cost.cols() || cost.rows() < 1) {
    throw std::invalid_argument("min_cost_assignment: cost matrix must be square and non-empty");
  }
  require_finite(cost, "min_cost_assignment");
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();

  // Kuhn-Munkres with row/column potentials, 1-based internally.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) row_to_col[static_cast<std::size_t>(match[j] - 1)] = j - 1;
  return row_to_col;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("accuracy: label vectors differ in length");
  }
  if (predicted.empty()) throw std::invalid_argument("accuracy: label vectors are empty");
  int max_label = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] < 0 || truth[i] < 0) {
      throw std::invalid_argument("accuracy: labels must be non-negative");
    }
    max_label = std::max({max_label, predicted[i], truth[i]});
  }
  const int k = max_label + 1;
  Matrix counts = Matrix::Zero(k, k);
  for (std::size_t i = 0; i < predicted.size(); ++i) counts(predicted[i], truth[i]) += 1.0;

  const std::vector<int> map = min_cost_assignment(-counts);
  double correct = 0.0;
  for (int p = 0; p < k; ++p) correct += counts(p, map[static_cast<std::size_t>(p)]);
  return correct / static_cast<double>(predicted.size());
}

ClusterAssignment cluster_compressed(const Matrix& m_mat, const SensingMatrix& sensing,
                                     int k, const RspParams& params, bool normalize,
                                     std::uint64_t seed) {
  Matrix data = m_mat;
  if (normalize) {
    for (Index j = 0; j < data.cols(); ++j) {
      const double norm = data.col(j).norm();
      if (norm > 0.0) data.col(j) /= norm;
    }
  }
  const RspSolution sol = solve(data, sensing, params);
  return kmeans(sol.row_space.basis, k, seed);
}

}  // namespace rsp
