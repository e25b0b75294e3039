#pragma once

#include "rsp/matrix.hpp"

#include <cstdint>

namespace rsp {

/// Random projection used to compress data columns from dimension m down to
/// p. Columns of `matrix` have unit Euclidean norm.
struct SensingMatrix {
  Matrix matrix;  // p x m
  std::uint64_t seed = 0;

  Index p() const { return matrix.rows(); }
  Index m() const { return matrix.cols(); }
};

/// p x m Gaussian matrix with each column scaled to unit norm.
/// Requires 1 <= p <= m.
SensingMatrix make_sensing(Index p, Index m, std::uint64_t seed);

/// Wraps an existing matrix, validating that every column has unit norm
/// (within 1e-12). Lets callers re-use a sensing matrix loaded from disk.
SensingMatrix sensing_from_matrix(Matrix matrix, std::uint64_t seed = 0);

/// Applies the projection: returns sensing.matrix * x (p x n).
Matrix compress(const SensingMatrix& sensing, const Matrix& x);

}  // namespace rsp
