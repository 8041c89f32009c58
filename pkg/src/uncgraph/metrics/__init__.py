"""Privacy scores, utility statistics and evaluation reports."""
from .privacy import (
    classes_count,
    epsilon_for_k,
    equivalence_classes,
    privacy_score,
    privacy_scores,
    score_from_signatures,
    signature_ids,
    signatures,
)
from .report import (
    REPORT_COLUMNS,
    EvaluationReport,
    edge_differences,
    evaluate,
    relative_error,
    write_long_csv,
    write_reports_csv,
)
from .utility import (
    STAT_NAMES,
    UtilityStats,
    anf_stats,
    clustering_coefficient,
    degree_stats,
    diameter_lower_bound,
    neighbourhood_function,
    path_stats_from_counts,
    triangle_count,
    utility_stats,
)

__all__ = [
    "classes_count", "epsilon_for_k", "equivalence_classes", "privacy_score", "privacy_scores",
    "score_from_signatures", "signature_ids", "signatures", "REPORT_COLUMNS",
    "EvaluationReport", "edge_differences", "evaluate", "relative_error", "write_long_csv",
    "write_reports_csv", "STAT_NAMES", "UtilityStats", "anf_stats", "clustering_coefficient",
    "degree_stats", "diameter_lower_bound", "neighbourhood_function", "path_stats_from_counts",
    "triangle_count", "utility_stats",
]
