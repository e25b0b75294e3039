#pragma once

#include "rsp/matrix.hpp"
#include "rsp/solver.hpp"

namespace rsp {

/// Row space straight from the compressed observations: top-r right singular
/// vectors of M, with no corruption model. Requires r <= min(rows, cols).
RowSpaceBasis sim_rowspace(const Matrix& m_mat, Index rank);

/// PCA baseline: estimates the row space by the SVD of M directly, ignoring
/// the sensing matrix. Identical computation to sim_rowspace; both names are
/// kept so harness reports carry the conventional labels.
RowSpaceBasis pca_rowspace(const Matrix& m_mat, Index rank);

}  // namespace rsp
