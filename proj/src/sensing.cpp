#include "rsp/sensing.hpp"

#include "rsp/rng.hpp"

namespace rsp {

SensingMatrix make_sensing(Index p, Index m, std::uint64_t seed) {
  if (p < 1 || m < 1) throw std::invalid_argument("make_sensing: dimensions must be positive");
  if (p > m) {
    throw std::invalid_argument("make_sensing: p must not exceed m (got p=" +
                                std::to_string(p) + ", m=" + std::to_string(m) + ")");
  }
  Rng rng(seed);
  Matrix r(p, m);
  // Column by column so the draw order is part of the format: entries within
  // a column are filled top to bottom, columns left to right.
  for (Index j = 0; j < m; ++j) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (Index i = 0; i < p; ++i) {
        const double x = rng.normal();
        r(i, j) = x;
        norm2 += x * x;
      }
    } while (norm2 == 0.0);
    r.col(j) /= std::sqrt(norm2);
  }
  return SensingMatrix{std::move(r), seed};
}

SensingMatrix sensing_from_matrix(Matrix matrix, std::uint64_t seed) {
  if (matrix.rows() < 1 || matrix.cols() < 1) {
    throw std::invalid_argument("sensing_from_matrix: matrix must be non-empty");
  }
  require_finite(matrix, "sensing_from_matrix");
  for (Index j = 0; j < matrix.cols(); ++j) {
    if (std::abs(matrix.col(j).norm() - 1.0) > 1e-12) {
      throw std::invalid_argument("sensing_from_matrix: column " + std::to_string(j) +
                                  " does not have unit norm");
    }
  }
  return SensingMatrix{std::move(matrix), seed};
}

Matrix compress(const SensingMatrix& sensing, const Matrix& x) {
  if (sensing.matrix.cols() != x.rows()) {
    throw ShapeError("compress: sensing is " + shape_string(sensing.matrix) +
                     " but data is " + shape_string(x));
  }
  return sensing.matrix * x;
}

}  // namespace rsp
