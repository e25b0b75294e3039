#pragma once

#include "rsp/matrix.hpp"

namespace rsp {

/// Leading singular triplets of a matrix. Columns of `left` / `right` are
/// orthonormal; `values` is non-increasing and non-negative.
struct TruncatedSvd {
  Matrix left;    // rows x rank
  Vector values;  // rank
  Matrix right;   // cols x rank
};

/// Top-`rank` singular triplets. Small problems (min dimension <= 64) go
/// through a dense decomposition; larger ones use a randomized range finder
/// with a fixed internal seed, so results are deterministic either way.
/// Requires 1 <= rank <= min(rows, cols).
TruncatedSvd truncated_svd(const Matrix& a, Index rank);

/// Largest singular value, via power iteration on the Gram operator.
/// Stops when successive estimates agree to 1e-10 (relative), or after
/// 1000 iterations, whichever comes first.
double operator_norm(const Matrix& a);

}  // namespace rsp
