#include "rsp/metrics.hpp"

namespace rsp {

double projector_snr(const RowSpaceBasis& v_true, const RowSpaceBasis& v_est) {
  if (v_true.points() != v_est.points()) {
    throw ShapeError("projector_snr: bases live in different dimensions (" +
                     std::to_string(v_true.points()) + " vs " + std::to_string(v_est.points()) + ")");
  }
  const double rt = static_cast<double>(v_true.rank());
  const double re = static_cast<double>(v_est.rank());
  // |Pt - Pe|_F^2 = tr(Pt) + tr(Pe) - 2 tr(Pt Pe) = rt + re - 2 |Vt^T Ve|_F^2
  const double cross = (v_true.basis.transpose() * v_est.basis).squaredNorm();
  const double diff = std::max(rt + re - 2.0 * cross, 0.0);
  if (diff < 1e-15) return 300.0;
  return 10.0 * std::log10(rt / diff);
}

double score_of_snr(double snr_db) {
  if (snr_db >= 30.0) return 1.0;
  if (snr_db >= 20.0) return 0.5;
  if (snr_db >= 15.0) return 0.2;
  return 0.0;
}

std::pair<double, double> support_metrics(const Matrix& s_true, const Matrix& s_est,
                                          double threshold) {
  if (s_true.rows() != s_est.rows() || s_true.cols() != s_est.cols()) {
    throw ShapeError("support_metrics: shapes differ (" + shape_string(s_true) + " vs " +
                     shape_string(s_est) + ")");
  }
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) {
    throw std::invalid_argument("support_metrics: threshold must be finite and >= 0");
  }
  std::size_t n_true = 0, n_est = 0, n_both = 0;
  for (Index j = 0; j < s_true.cols(); ++j) {
    for (Index i = 0; i < s_true.rows(); ++i) {
      const bool in_true = std::abs(s_true(i, j)) > threshold;
      const bool in_est = std::abs(s_est(i, j)) > threshold;
      n_true += in_true;
      n_est += in_est;
      n_both += in_true && in_est;
    }
  }
  const double precision = n_est == 0 ? 1.0 : static_cast<double>(n_both) / static_cast<double>(n_est);
  const double recall = n_true == 0 ? 1.0 : static_cast<double>(n_both) / static_cast<double>(n_true);
  return {precision, recall};
}

RecoveryReport make_recovery_report(const RowSpaceBasis& v_true, const RowSpaceBasis& v_est,
                                    const Matrix& s_true, const Matrix& s_est) {
  RecoveryReport out;
  out.snr_db = projector_snr(v_true, v_est);
  out.score = score_of_snr(out.snr_db);
  const double peak = s_est.size() > 0 ? s_est.cwiseAbs().maxCoeff() : 0.0;
  const auto pr = support_metrics(s_true, s_est, 1e-3 * peak);
  out.support_precision = pr.first;
  out.support_recall = pr.second;
  std::size_t nonzeros = 0;
  for (Index j = 0; j < s_est.cols(); ++j) {
    for (Index i = 0; i < s_est.rows(); ++i) nonzeros += s_est(i, j) != 0.0;
  }
  out.corruption_size = s_est.cols() > 0
                            ? static_cast<double>(nonzeros) / static_cast<double>(s_est.cols())
                            : 0.0;
  return out;
}

}  // namespace rsp
