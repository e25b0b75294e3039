#include "rsp/svd.hpp"

#include "rsp/rng.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>

namespace rsp {

namespace {

// Below this size a dense decomposition is cheap and more accurate than
// sketching, so the randomized path only kicks in for larger problems.
constexpr Index kDenseCutoff = 64;
constexpr Index kOversample = 10;
constexpr int kPowerIterations = 2;
// Fixed seed for the sketching matrix; makes the randomized path a pure
// function of its input.
constexpr std::uint64_t kSketchSeed = 0x53564453454544ULL;  // "SVDSEED"

TruncatedSvd dense_svd(const Matrix& a, Index rank) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.left = svd.matrixU().leftCols(rank);
  out.values = svd.singularValues().head(rank);
  out.right = svd.matrixV().leftCols(rank);
  return out;
}

Matrix thin_q(const Matrix& y) {
  Eigen::HouseholderQR<Matrix> qr(y);
  return qr.householderQ() * Matrix::Identity(y.rows(), y.cols());
}

// Randomized range finder (Halko et al. style): sketch the column space of a
// tall matrix, refine with a couple of power iterations, then solve the small
// projected problem exactly.
TruncatedSvd randomized_svd_tall(const Matrix& a, Index rank) {
  const Index sketch = std::min(rank + kOversample, a.cols());
  Rng rng(kSketchSeed);
  const Matrix omega = gaussian_matrix(a.cols(), sketch, rng);

  Matrix q = thin_q(a * omega);
  for (int it = 0; it < kPowerIterations; ++it) {
    q = thin_q(a * thin_q(a.transpose() * q));
  }

  const Matrix b = q.transpose() * a;  // sketch x cols
  Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSvd out;
  out.left = q * svd.matrixU().leftCols(rank);
  out.values = svd.singularValues().head(rank);
  out.right = svd.matrixV().leftCols(rank);
  return out;
}

}  // namespace

TruncatedSvd truncated_svd(const Matrix& a, Index rank) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw std::invalid_argument("truncated_svd: matrix must be non-empty");
  }
  require_finite(a, "truncated_svd");
  const Index max_rank = std::min(a.rows(), a.cols());
  if (rank < 1 || rank > max_rank) {
    throw std::invalid_argument("truncated_svd: rank must be in [1, " +
                                std::to_string(max_rank) + "], got " + std::to_string(rank));
  }
  if (max_rank <= kDenseCutoff) return dense_svd(a, rank);
  if (a.rows() >= a.cols()) return randomized_svd_tall(a, rank);
  // Wide matrix: factor the transpose and swap the factors back.
  TruncatedSvd t = randomized_svd_tall(a.transpose(), rank);
  return TruncatedSvd{std::move(t.right), std::move(t.values), std::move(t.left)};
}

double operator_norm(const Matrix& a) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw std::invalid_argument("operator_norm: matrix must be non-empty");
  }
  require_finite(a, "operator_norm");
  if (a.norm() == 0.0) return 0.0;

  constexpr int kMaxIterations = 1000;
  constexpr double kTol = 1e-10;
  Rng rng(kSketchSeed ^ 0x4F50);
  Vector v(a.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  double vn = v.norm();
  while (vn == 0.0) {  // essentially impossible, but keep the loop total
    for (Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    vn = v.norm();
  }
  v /= vn;

  double sigma = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    const Vector w = a * v;
    const double next = w.norm();
    if (next == 0.0) {
      // v landed in the null space; re-randomize and keep going.
      for (Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
      v.normalize();
      continue;
    }
    const bool settled = std::abs(next - sigma) <= kTol * std::max(next, 1e-300);
    sigma = next;
    if (settled) return sigma;
    v = a.transpose() * w;
    v /= v.norm();
  }
  // Iteration cap reached: return the current estimate rather than failing;
  // the estimate is a valid lower bound and is typically accurate anyway.
  return sigma;
}

}  // namespace rsp
