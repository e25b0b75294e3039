#pragma once

#include "rsp/matrix.hpp"
#include "rsp/sensing.hpp"

#include <vector>

namespace rsp {

/// Orthonormal basis for an estimated row space, stored column-wise
/// (n x r). The constructor enforces basis^T basis = I within 1e-10.
struct RowSpaceBasis {
  Matrix basis;

  RowSpaceBasis() = default;
  explicit RowSpaceBasis(Matrix b);

  Index points() const { return basis.rows(); }
  Index rank() const { return basis.cols(); }
};

struct RspParams {
  Index rank = 2;          // r, target row-space dimension (r < p recommended)
  double lambda = 1.0 / 128.0;  // > 0
  int max_iters = 1000;
  double tol = 1e-6;       // > 0, on relative change of the sparse iterate
};

struct RspSolution {
  RowSpaceBasis row_space;     // n x r
  Matrix sparse;               // m x n corruption estimate
  std::vector<double> objective_trace;  // one value per iteration
  int iterations = 0;
  bool converged = false;
  double rho = 0.0;            // proximal step constant actually used
};

/// Objective      lambda * |S|_1 + 1/2 * | (M - R S)(I - V V^T) |_F^2
/// evaluated without forming the n x n projector.
double objective(const Matrix& m_mat, const SensingMatrix& sensing, const RowSpaceBasis& v,
                 const Matrix& s, double lambda);

/// V-step: top-r right singular vectors of M - R S. Requires
/// 1 <= r <= cols(M); ranks beyond min(rows, cols) are filled with an
/// orthonormal completion so the basis is always valid.
RowSpaceBasis update_v(const Matrix& m_mat, const SensingMatrix& sensing, const Matrix& s,
                       Index rank);

/// Gradient of the smooth term in S:  R^T (R S - M)(I - V V^T).
Matrix gradient_s(const Matrix& m_mat, const SensingMatrix& sensing, const RowSpaceBasis& v,
                  const Matrix& s);

/// Proximal S-step: soft-threshold of S - grad / rho at level lambda / rho.
/// Unlike the full solve, lambda = 0 is allowed here (a plain gradient step).
Matrix update_s(const Matrix& s, const Matrix& grad, double lambda, double rho);

/// Alternating minimization for the row space and the sparse corruption of
/// compressed data M = R X. Starts from S = 0, alternates the exact V-step
/// with one proximal S-step (step constant rho = 1.1 * |R|_2^2), and stops
/// when the relative change of S drops below tol. When rank >= p the V-step
/// already reproduces M - R S exactly, so the loop terminates after a single
/// iteration with S = 0. `s_init` overrides the zero initialization (a test
/// hook for fixed-point checks).
RspSolution solve(const Matrix& m_mat, const SensingMatrix& sensing, const RspParams& params,
                  const Matrix* s_init = nullptr);

}  // namespace rsp
