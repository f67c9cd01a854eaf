"""Numerical laboratory for central limit behaviour of m-dependent
triangular arrays: model catalogue, condition functionals, an exact
martingale oracle, and Monte Carlo convergence checks."""

from .conditions import (
    ConditionReport,
    ConditionValue,
    DegenerateVarianceError,
    InsufficientGridError,
    ZeroDependenceError,
    asymptotic_verdict,
    berk_check,
    berk_holds,
    component_reports,
    condition_report,
    condition_series,
    lindeberg_classic,
    lindeberg_mdep,
    lyapunov_ratio,
    orey_ratio,
    rio_functional,
    romano_wolf_check,
    romano_wolf_holds,
    tail_second_moment,
    tail_second_moment_mc,
)
from .martingale import (
    CheckResult,
    HHReport,
    HypothesisViolationError,
    MartingaleTrace,
    UnsupportedFamilyError,
    build_trace,
    check_bounds,
    check_hh_hypotheses,
    check_structure,
    check_tower,
    check_truncation,
    trace_summary,
)
from .models import (
    ENUMERATION_CAP,
    ArrayModel,
    ContinuousModelError,
    EnumerationTooLargeError,
    InvalidParameterError,
    OutcomeTable,
    RowSample,
    Schedule,
    TruncationSplit,
    build_model,
    cov_band,
    enumerate_outcomes,
    exact_cov,
    exact_sigma2,
    marginal_law,
    marginal_law_groups,
    model_from_config,
    model_to_config,
    row_rng,
    sample_row,
    truncated_model,
    window_variance_max,
)
from .montecarlo import (
    ConvergenceReport,
    EmpiricalDistribution,
    convergence_sweep,
    kolmogorov_band,
    ks_statistic,
    simulate_normalized_sums,
)

__version__ = "0.1.0"
