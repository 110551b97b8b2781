"""Validity analytics: correlations, agreement, drift, factor structure and
question-pool stability."""

from .agreement import grouped_weighted_kappa, weighted_kappa
from .correlation import (
    CorrelationMatrix,
    CorrelationResult,
    bonferroni,
    correlation_matrix,
    correlation_matrix_csv,
    kendall_tau_b,
    kendall_tau_b_exact_p,
    spearman_rho,
)
from .drift import DriftWindow, drift_analysis, drift_series_csv
from .factors import (
    FactorModel,
    extract_and_rotate,
    factor_model_markdown,
    factor_model_to_json,
    kaiser_count,
    parallel_analysis,
    varimax,
)
from .poolsim import (
    PoolSimPoint,
    pool_sim_csv,
    pool_simulation_from_tables,
    question_pool_simulation,
)

__all__ = [
    "CorrelationMatrix",
    "CorrelationResult",
    "DriftWindow",
    "FactorModel",
    "PoolSimPoint",
    "bonferroni",
    "correlation_matrix",
    "correlation_matrix_csv",
    "drift_analysis",
    "drift_series_csv",
    "extract_and_rotate",
    "factor_model_markdown",
    "factor_model_to_json",
    "grouped_weighted_kappa",
    "kaiser_count",
    "kendall_tau_b",
    "kendall_tau_b_exact_p",
    "parallel_analysis",
    "pool_sim_csv",
    "pool_simulation_from_tables",
    "question_pool_simulation",
    "spearman_rho",
    "varimax",
    "weighted_kappa",
]
