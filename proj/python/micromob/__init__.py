"""Dockless micromobility trip-speed pattern analysis.

Thin re-export of the compiled core: labeled dataset construction,
matching-based supervised clustering, consensus model-order selection,
the Wilcoxon rank-sum comparison, and the end-to-end report pipeline.
"""

from micromob._core import (  # noqa: F401
    AnalysisDataset,
    ClusterConfig,
    ClusterModel,
    ClusterStats,
    ConfigError,
    ConsensusConfig,
    ConsensusCurve,
    ConsensusEntry,
    DaytimeBoundary,
    DistanceMetric,
    DomainError,
    Granularity,
    IoError,
    Label,
    LabeledPoint,
    Mode,
    QuotaPolicy,
    RankSumMethod,
    RankSumResult,
    __version__,
    analyze,
    default_granularity,
    fit,
    label_day_of_week,
    label_name,
    label_time_of_day,
    make_dataset,
    period_name,
    ranksum_test,
    ranksum_test_weighted,
    run_consensus,
    select_model_order,
)

__all__ = [
    "AnalysisDataset",
    "ClusterConfig",
    "ClusterModel",
    "ClusterStats",
    "ConfigError",
    "ConsensusConfig",
    "ConsensusCurve",
    "ConsensusEntry",
    "DaytimeBoundary",
    "DistanceMetric",
    "DomainError",
    "Granularity",
    "IoError",
    "Label",
    "LabeledPoint",
    "Mode",
    "QuotaPolicy",
    "RankSumMethod",
    "RankSumResult",
    "__version__",
    "analyze",
    "default_granularity",
    "fit",
    "label_day_of_week",
    "label_name",
    "label_time_of_day",
    "make_dataset",
    "period_name",
    "ranksum_test",
    "ranksum_test_weighted",
    "run_consensus",
    "select_model_order",
]
