#pragma once

#include "rsp/matrix.hpp"
#include "rsp/solver.hpp"

#include <utility>

namespace rsp {

/// How well an estimated row space and sparse component match the truth.
struct RecoveryReport {
  double snr_db = 0.0;
  double score = 0.0;              // in {0, 0.2, 0.5, 1}
  double corruption_size = 0.0;    // nonzeros of the estimate / n
  double support_precision = 1.0;
  double support_recall = 1.0;
};

/// Signal-to-noise ratio in dB between the projectors of two bases:
/// 10 log10( |Vt Vt^T|_F^2 / |Vt Vt^T - Ve Ve^T|_F^2 ), with the first
/// argument as reference. Computed via trace identities, never forming the
/// n x n projectors. Capped at 300 dB when the difference vanishes.
double projector_snr(const RowSpaceBasis& v_true, const RowSpaceBasis& v_est);

/// The four-level score used in the phase-transition plots:
/// 0 below 15 dB, 0.2 in [15, 20), 0.5 in [20, 30), 1 at or above 30.
double score_of_snr(double snr_db);

/// Precision and recall of the estimated support {(i,j): |entry| > threshold}
/// against the true support. An empty estimated (resp. true) support gives
/// precision (resp. recall) 1 by convention.
std::pair<double, double> support_metrics(const Matrix& s_true, const Matrix& s_est,
                                          double threshold);

/// Assembles a full report. The support threshold is 1e-3 * max|s_est|
/// (relative, so the convention survives rescaling); corruption size counts
/// exact nonzeros of the estimate per column.
RecoveryReport make_recovery_report(const RowSpaceBasis& v_true, const RowSpaceBasis& v_est,
                                    const Matrix& s_true, const Matrix& s_est);

}  // namespace rsp
