"""Log-stable bounds for investment schedules and withdrawal plans.

Terminal wealth of a regular investment schedule under a geometric
Levy alpha-stable asset process admits an almost-sure log-stable lower
bound; reversing the recursion turns a withdrawal plan into an
investment schedule on the reciprocal process and yields an upper bound
on the probability of completing every withdrawal.  This package
implements the bound constructions, the planning procedures built on
them, a Monte Carlo oracle that validates every almost-sure and
ordering claim, and a data pipeline that fits the asset process to
annual index data.
"""

from .bounds import (
    BoundParams,
    ContinuousBound,
    Schedule,
    bound_continuous,
    bound_dca_closed_form,
    bound_general,
    dca_schedule,
    returns_from_bound,
    xxr_bracket,
)
from .data import (
    FitResult,
    RawSeries,
    ReturnSeries,
    fit_stable,
    load_csv,
    qq_points,
    to_returns,
)
from .oracle import (
    OracleReport,
    WealthPath,
    check_domination,
    check_withdrawal_duality,
    estimate_success_prob,
    simulate_paths,
    split_seed,
)
from .planner import (
    FrontierTable,
    LumpSumDiscount,
    SurrogateFit,
    continuous_frontier,
    discrete_frontier,
    fit_surrogate,
    frontier_surface,
    lump_sum_discount,
    principal_curve,
)
from .quadrature import QuadratureError, romberg
from .stable import (
    StableParams,
    affine,
    cdf,
    char_fn,
    convolve,
    pdf,
    quantile,
    sample,
)
from .withdrawals import (
    StarBound,
    WithdrawalPlan,
    continuous_star_bound,
    equal_plan,
    necessary_principal,
    star_bound_closed_form,
    star_bound_general,
    success_prob_upper_bound,
)

__version__ = "0.1.0"

__all__ = [
    "BoundParams",
    "ContinuousBound",
    "FitResult",
    "FrontierTable",
    "LumpSumDiscount",
    "OracleReport",
    "QuadratureError",
    "RawSeries",
    "ReturnSeries",
    "Schedule",
    "StableParams",
    "StarBound",
    "SurrogateFit",
    "WealthPath",
    "WithdrawalPlan",
    "affine",
    "bound_continuous",
    "bound_dca_closed_form",
    "bound_general",
    "cdf",
    "char_fn",
    "check_domination",
    "check_withdrawal_duality",
    "continuous_frontier",
    "continuous_star_bound",
    "convolve",
    "dca_schedule",
    "discrete_frontier",
    "equal_plan",
    "estimate_success_prob",
    "fit_stable",
    "fit_surrogate",
    "frontier_surface",
    "load_csv",
    "lump_sum_discount",
    "necessary_principal",
    "pdf",
    "principal_curve",
    "qq_points",
    "quantile",
    "returns_from_bound",
    "romberg",
    "sample",
    "simulate_paths",
    "split_seed",
    "star_bound_closed_form",
    "star_bound_general",
    "success_prob_upper_bound",
    "to_returns",
    "xxr_bracket",
]
