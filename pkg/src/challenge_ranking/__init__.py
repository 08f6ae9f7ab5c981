"""Ranking analysis for biomedical image analysis challenges."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AggregationUndefined,
    ChallengeRankingError,
    InputError,
    MetricUndefined,
    PreconditionError,
    SchemaParseError,
    SchemaValidationError,
    TauUndefined,
)
from .masks import LabelMask, read_mask, write_mask  # noqa: E402
from .metrics import MetricValue, directed_distances, dsc, extract_boundary, hausdorff, hd95  # noqa: E402
from .nonparametric import kendall_tau, kendall_tau_b, wilcoxon_signed_rank  # noqa: E402
from .ranking import (  # noqa: E402
    Ranking,
    RankingScheme,
    aggregate,
    assign_ranks,
    rank,
    rank_case_based,
    rank_metric_based,
    rank_multi_metric,
)
from .robustness import (  # noqa: E402
    BootstrapConfig,
    bootstrap_stability,
    compare_scheme_stability,
    inclusion_check,
    leave_one_out_stability,
    missing_data_audit,
    observer_ranking_comparison,
)
from .stats import boxplot_summary, percentile  # noqa: E402
from .table import MetricSpec, ResultTable, read_results_csv, write_results_csv  # noqa: E402
