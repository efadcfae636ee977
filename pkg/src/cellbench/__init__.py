"""cellbench: a benchmark engine for cell instance segmentation.

Reproduces a challenge-style evaluation pipeline end to end: IoU-matched F1
scoring with boundary-cell and small-cell rules, runtime-tolerance
leaderboards under five ranking schemes, bootstrap rank stability with
Kendall's tau and pairwise Wilcoxon tests, and the instance-decoding
procedures used by top cell-segmentation systems (gradient-flow tracking,
marker watershed, star-convex polygons, Fourier contours), all operating on
dense maps so they can be tested without any trained network.
"""

from ._kernels import HAVE_COMPILED
from .labelmap import (
    ImageMeta,
    LabelMap,
    QcReport,
    as_label_map,
    filter_small_cells,
    load_label_map,
    qc_image,
    relabel_connected,
    remove_boundary_cells,
    save_label_map,
)
from .metrics import (
    MatchConfig,
    MatchResult,
    MetricsRecord,
    evaluate_image_pair,
    iou_matrix,
    match_instances,
    precision_recall_f1,
)
from .ranking import (
    LeaderBoard,
    RankingTable,
    RunRecord,
    aggregate_then_rank,
    build_leaderboard,
    effective_runtime,
    per_case_ranks,
    rank_then_aggregate,
    test_based_rank,
    tolerance_seconds,
)
from .stats import (
    BootstrapConfig,
    SignificanceMatrix,
    StabilityReport,
    bootstrap_ranking_stability,
    kendall_tau,
    significance_matrix,
    wilcoxon_one_sided_p,
)

__version__ = "0.1.0"

__all__ = [
    "HAVE_COMPILED",
    "ImageMeta",
    "LabelMap",
    "QcReport",
    "as_label_map",
    "filter_small_cells",
    "load_label_map",
    "qc_image",
    "relabel_connected",
    "remove_boundary_cells",
    "save_label_map",
    "MatchConfig",
    "MatchResult",
    "MetricsRecord",
    "evaluate_image_pair",
    "iou_matrix",
    "match_instances",
    "precision_recall_f1",
    "LeaderBoard",
    "RankingTable",
    "RunRecord",
    "aggregate_then_rank",
    "build_leaderboard",
    "effective_runtime",
    "per_case_ranks",
    "rank_then_aggregate",
    "test_based_rank",
    "tolerance_seconds",
    "BootstrapConfig",
    "SignificanceMatrix",
    "StabilityReport",
    "bootstrap_ranking_stability",
    "kendall_tau",
    "significance_matrix",
    "wilcoxon_one_sided_p",
    "__version__",
]
