#include "rsp/solver.hpp"

#include "rsp/svd.hpp"

#include <Eigen/SVD>

namespace rsp {

namespace {

void check_pair(const Matrix& m_mat, const SensingMatrix& sensing) {
  if (m_mat.rows() != sensing.p()) {
    throw ShapeError("solver: compressed data has " + std::to_string(m_mat.rows()) +
                     " rows but sensing produces " + std::to_string(sensing.p()));
  }
}

// Top-`rank` right singular vectors of `a`; ranks beyond min(rows, cols) are
// padded from the full decomposition so the result is still orthonormal.
Matrix right_basis_of(const Matrix& a, Index rank) {
  if (rank <= std::min(a.rows(), a.cols())) return truncated_svd(a, rank).right;
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeFullV);
  return svd.matrixV().leftCols(rank);
}

}  // namespace

RowSpaceBasis::RowSpaceBasis(Matrix b) : basis(std::move(b)) {
  if (basis.rows() < 1 || basis.cols() < 1) {
    throw std::invalid_argument("RowSpaceBasis: basis must be non-empty");
  }
  if (basis.cols() > basis.rows()) {
    throw std::invalid_argument("RowSpaceBasis: more columns than rows cannot be orthonormal");
  }
  require_finite(basis, "RowSpaceBasis");
  const Matrix gram = basis.transpose() * basis;
  const double err = (gram - Matrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-10) {
    throw std::invalid_argument("RowSpaceBasis: columns are not orthonormal (deviation " +
                                std::to_string(err) + ")");
  }
}

double objective(const Matrix& m_mat, const SensingMatrix& sensing, const RowSpaceBasis& v,
                 const Matrix& s, double lambda) {
  check_pair(m_mat, sensing);
  if (s.rows() != sensing.m() || s.cols() != m_mat.cols()) {
    throw ShapeError("objective: sparse iterate is " + shape_string(s) + ", expected " +
                     std::to_string(sensing.m()) + "x" + std::to_string(m_mat.cols()));
  }
  if (v.points() != m_mat.cols()) {
    throw ShapeError("objective: basis has " + std::to_string(v.points()) +
                     " rows but data has " + std::to_string(m_mat.cols()) + " columns");
  }
  const Matrix a = m_mat - sensing.matrix * s;
  const Matrix residual = a - (a * v.basis) * v.basis.transpose();
  return lambda * l1_norm(s) + 0.5 * residual.squaredNorm();
}

RowSpaceBasis update_v(const Matrix& m_mat, const SensingMatrix& sensing, const Matrix& s,
                       Index rank) {
  check_pair(m_mat, sensing);
  if (rank < 1 || rank > m_mat.cols()) {
    throw std::invalid_argument("update_v: rank must be in [1, " +
                                std::to_string(m_mat.cols()) + "]");
  }
  const Matrix a = m_mat - sensing.matrix * s;
  return RowSpaceBasis(right_basis_of(a, rank));
}

Matrix gradient_s(const Matrix& m_mat, const SensingMatrix& sensing, const RowSpaceBasis& v,
                  const Matrix& s) {
  check_pair(m_mat, sensing);
  if (s.rows() != sensing.m() || s.cols() != m_mat.cols()) {
    throw ShapeError("gradient_s: sparse iterate is " + shape_string(s) + ", expected " +
                     std::to_string(sensing.m()) + "x" + std::to_string(m_mat.cols()));
  }
  const Matrix d = sensing.matrix * s - m_mat;
  const Matrix residual = d - (d * v.basis) * v.basis.transpose();
  return sensing.matrix.transpose() * residual;
}

Matrix update_s(const Matrix& s, const Matrix& grad, double lambda, double rho) {
  if (s.rows() != grad.rows() || s.cols() != grad.cols()) {
    throw ShapeError("update_s: iterate is " + shape_string(s) + " but gradient is " +
                     shape_string(grad));
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("update_s: rho must be finite and positive");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("update_s: lambda must be finite and >= 0");
  }
  return shrink(s - grad / rho, lambda / rho);
}

RspSolution solve(const Matrix& m_mat, const SensingMatrix& sensing, const RspParams& params,
                  const Matrix* s_init) {
  check_pair(m_mat, sensing);
  require_finite(m_mat, "solve");
  const Index n = m_mat.cols();
  if (n < 1) throw std::invalid_argument("solve: data must have at least one column");
  if (params.rank < 1 || params.rank > n) {
    throw std::invalid_argument("solve: rank must be in [1, " + std::to_string(n) + "]");
  }
  if (!(params.lambda > 0.0) || !std::isfinite(params.lambda)) {
    throw std::invalid_argument("solve: lambda must be finite and positive");
  }
  if (params.max_iters < 1) throw std::invalid_argument("solve: max_iters must be positive");
  if (!(params.tol > 0.0)) throw std::invalid_argument("solve: tol must be positive");

  const double r_norm = operator_norm(sensing.matrix);
  const double rho = 1.1 * r_norm * r_norm;

  RspSolution out;
  out.rho = rho;
  Matrix s = Matrix::Zero(sensing.m(), n);
  Matrix a = m_mat;  // always M - R s for the current iterate
  if (s_init != nullptr) {
    if (s_init->rows() != sensing.m() || s_init->cols() != n) {
      throw ShapeError("solve: s_init is " + shape_string(*s_init) + ", expected " +
                       std::to_string(sensing.m()) + "x" + std::to_string(n));
    }
    require_finite(*s_init, "solve: s_init");
    s = *s_init;
    a = m_mat - sensing.matrix * s;
  }

  // Each pass reuses `a` for both half-steps: the V-step factors it, and the
  // gradient of the smooth term at the same S is just -a deflated by V.
  for (int it = 0; it < params.max_iters; ++it) {
    const Matrix v = right_basis_of(a, params.rank);
    const Matrix deflated = a - (a * v) * v.transpose();  // (M - R S)(I - V V^T)
    const Matrix grad = -(sensing.matrix.transpose() * deflated);
    const Matrix s_next = shrink(s - grad / rho, params.lambda / rho);

    const double delta = (s_next - s).norm() / std::max(1.0, s.norm());
    s = s_next;
    a = m_mat - sensing.matrix * s;
    const Matrix tail = a - (a * v) * v.transpose();
    out.objective_trace.push_back(params.lambda * l1_norm(s) + 0.5 * tail.squaredNorm());
    out.iterations = it + 1;
    if (delta < params.tol || delta == 0.0) {
      out.converged = true;
      break;
    }
  }

  out.sparse = std::move(s);
  out.row_space = RowSpaceBasis(right_basis_of(a, params.rank));
  return out;
}

}  // namespace rsp
