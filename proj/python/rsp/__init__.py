"""Row space pursuit: compressive robust subspace clustering.

Thin wrapper over the C++ extension; everything lives in ``rsp._rsp``.
"""

from ._rsp import (  # noqa: F401
    ClusterAssignment,
    KMeansParams,
    RecoveryReport,
    RowSpaceBasis,
    RspParams,
    RspSolution,
    SensingMatrix,
    SynConfig,
    SynInstance,
    TruncatedSvd,
    __version__,
    accuracy,
    cluster_compressed,
    compress,
    derive_seed,
    frobenius_norm,
    generate,
    gradient_s,
    kmeans,
    make_recovery_report,
    make_sensing,
    matmul,
    objective,
    operator_norm,
    pca_rowspace,
    projector_snr,
    score_of_snr,
    shrink,
    sim_rowspace,
    solve,
    support_metrics,
    truncated_svd,
    update_s,
    update_v,
)
