#include "rsp/baselines.hpp"

#include "rsp/svd.hpp"

namespace rsp {

RowSpaceBasis sim_rowspace(const Matrix& m_mat, Index rank) {
  return RowSpaceBasis(truncated_svd(m_mat, rank).right);
}

RowSpaceBasis pca_rowspace(const Matrix& m_mat, Index rank) {
  return RowSpaceBasis(truncated_svd(m_mat, rank).right);
}

}  // namespace rsp
