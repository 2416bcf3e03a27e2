"""Planning procedures built on the wealth and withdrawal bounds.

Contents: the lump-sum discount (a lump investment whose terminal wealth
is no better in distribution than continuous equal-rate investing), the
drift-over-scale frontier sweeps that certify "necessary principal >=
total withdrawn" over parameter grids, the necessary-principal curve as
a function of confidence, and a polynomial surrogate of the discrete
frontier.

The frontier sweeps descend a ratio grid exactly as specified by their
pseudocode (start 20, step 0.01, both configurable); the descent is
resolved analytically from the monotonicity of the success condition in
the scale parameter and then verified against the literal grid
comparison at the landing point.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, exp, log

import numpy as np

from .bounds import continuous_scale_integral, log_expm1_abs
from .stable import StableParams, quantile
from .withdrawals import (
    StarBound,
    continuous_star_bound,
    principal_from_standard_quantile,
)

GRID_START = 20.0
GRID_STEP = 0.01

K_BASIS_LABELS = ("1", "sqrt(k)", "k^(1/4)", "k^(1/8)")


@dataclass(frozen=True)
class LumpSumDiscount:
    """Lump-sum equivalent (x, s) of unit continuous investing over unit time.

    A lump investment of x currency units held for s time units has
    terminal wealth no better in distribution than investing 1 unit at a
    constant rate over 1 time unit.  Scaling: d units over t time units
    continuous maps to a lump sum of x*d units over s*t time units.
    Both quantities depend only on the shape and drift of the process.
    """

    x: float
    s: float


def lump_sum_discount(process: StableParams) -> LumpSumDiscount:
    """Compute the lump-sum discount for the given process.

    s is the continuous-schedule scale integral over [0, 1] (Romberg);
    x = (e^mu - 1) / (mu * e^(mu*s)).  Requires alpha != 1, mu != 0.
    """
    alpha, mu = process.alpha, process.mu
    if alpha == 1.0:
        raise ValueError("lump-sum discount requires alpha != 1")
    if mu == 0.0:
        raise ValueError("lump-sum discount requires mu != 0")
    s = continuous_scale_integral(alpha, mu)
    log_x = float(log_expm1_abs(mu)) - log(abs(mu)) - mu * s
    return LumpSumDiscount(x=exp(log_x), s=s)


@dataclass(frozen=True)
class FrontierTable:
    """Largest surviving drift-over-scale ratios on a descending grid.

    kind "k": keys are withdrawal counts, values[i] is the largest grid
    ratio such that every drift in the sweep grid forces the necessary
    principal to at least keys[i].  kind "mu": keys are drifts, values[i]
    certifies a necessary principal of at least the (unit) total for the
    continuous schedule; min_sigma = keys / values is the induced scale
    floor.
    """

    kind: str
    keys: np.ndarray
    values: np.ndarray
    confidence: float
    alpha: float
    beta: float
    grid_start: float = GRID_START
    grid_step: float = GRID_STEP

    @property
    def min_sigma(self) -> np.ndarray:
        if self.kind != "mu":
            raise ValueError("min_sigma is defined for drift-keyed tables only")
        return self.keys / self.values


def standardized_quantile(alpha: float, beta: float, confidence: float) -> float:
    """Confidence-quantile of S(alpha, -beta, 1, 0), shared across sweeps."""
    return quantile(StableParams(alpha, -beta, 1.0, 0.0), confidence)


def _descend(start: float, step: float, log_target, mu0, slope, q: float, label: str):
    """Largest grid ratio s with mu0 + slope*q/s >= log_target for all entries.

    slope = mu * scale_factor > 0; the left side is monotone in s when
    q != 0.  Returns the literal descending-grid landing value.
    """
    mu0 = np.asarray(mu0, dtype=float)
    slope = np.asarray(slope, dtype=float)

    def holds(s: float) -> bool:
        return bool(np.all(mu0 + slope * q / s >= log_target))

    if holds(start):
        return start
    if q <= 0.0:
        raise RuntimeError(
            f"frontier sweep for {label}: condition unreachable on the grid "
            f"(standardized quantile {q} <= 0)"
        )
    deficit = log_target - mu0
    binding = deficit > 0.0
    s_allowed = np.min(slope[binding] * q / deficit[binding])
    m = max(0, ceil((start - s_allowed) / step - 1e-9))
    # settle float edges against the literal grid comparison
    while m * step < start and not holds(start - m * step):
        m += 1
    while m > 1 and holds(start - (m - 1) * step):
        m -= 1
    s = start - m * step
    if s <= 0.0:
        raise RuntimeError(f"frontier sweep for {label}: no positive grid ratio survives")
    return float(round(s, 12))


def _equal_plan_bound_factors(alpha: float, mus: np.ndarray, k: int):
    """Location and scale factor of the star bound for unit equal plans.

    Returns (mu0, factor) arrays over the drift grid, where
    sigma0 = sigma * factor for any scale sigma.
    """
    mus = np.asarray(mus, dtype=float)
    mu0 = -mus + log_expm1_abs(-mus * k) - log_expm1_abs(-mus)
    if k == 1:
        return mu0, np.ones_like(mus)
    j = np.arange(1, k)
    log_terms = log_expm1_abs(np.outer(mus, (k - j))) - log_expm1_abs(mus * k)[:, None]
    factor = (1.0 + np.exp(alpha * log_terms).sum(axis=1)) ** (1.0 / alpha)
    return mu0, factor


def discrete_frontier(
    confidence: float,
    alpha: float,
    beta: float,
    k_values=range(2, 61),
    mu_grid=None,
    grid_start: float = GRID_START,
    grid_step: float = GRID_STEP,
    q_std: float | None = None,
) -> FrontierTable:
    """Frontier ratios s_k certifying necessary principal >= k withdrawals.

    For each k, finds the largest ratio on the descending grid such that
    for every drift mu in the sweep grid, the plan of k unit withdrawals
    at unit spacing under scale sigma = mu / s_k has necessary principal
    at least k at the given confidence.
    """
    if not (0.0 < confidence < 1.0):
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    mus = (
        0.001 * np.arange(1, 501) if mu_grid is None else np.asarray(mu_grid, dtype=float)
    )
    if np.any(mus <= 0.0):
        raise ValueError("drift sweep grid must be positive")
    ks = np.asarray(sorted(k_values), dtype=int)
    if ks.size == 0 or ks[0] < 2:
        raise ValueError("k grid must be a nonempty subset of {2, 3, ...}")
    if q_std is None:
        q_std = standardized_quantile(alpha, beta, confidence)
    values = np.empty(ks.size)
    for i, k in enumerate(ks):
        mu0, factor = _equal_plan_bound_factors(alpha, mus, int(k))
        values[i] = _descend(
            grid_start, grid_step, log(k), mu0, mus * factor, q_std, f"k={k}"
        )
    return FrontierTable(
        kind="k",
        keys=ks,
        values=values,
        confidence=confidence,
        alpha=alpha,
        beta=beta,
        grid_start=grid_start,
        grid_step=grid_step,
    )


def continuous_frontier(
    confidence: float,
    alpha: float,
    beta: float,
    mu_grid=None,
    grid_start: float = GRID_START,
    grid_step: float = GRID_STEP,
    q_std: float | None = None,
) -> FrontierTable:
    """Frontier ratios s_mu for the continuous unit-total withdrawal schedule.

    For each drift mu, finds the largest grid ratio such that the scale
    sigma = mu / s_mu forces a necessary principal of at least the total
    withdrawn.  The induced scale floor mu / s_mu is exposed via
    ``FrontierTable.min_sigma``.
    """
    if not (0.0 < confidence < 1.0):
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    if not (1.0 < alpha <= 2.0):
        raise ValueError("continuous frontier sweeps support alpha in (1, 2]")
    mus = (
        0.01 * np.arange(1, 501) if mu_grid is None else np.asarray(mu_grid, dtype=float)
    )
    if np.any(mus <= 0.0):
        raise ValueError("drift grid must be positive")
    if q_std is None:
        q_std = standardized_quantile(alpha, beta, confidence)
    values = np.empty(mus.size)
    for i, mu in enumerate(mus):
        mu_star = float(log_expm1_abs(-mu)) - log(mu)
        factor = continuous_scale_integral(alpha, -mu) ** (1.0 / alpha)
        values[i] = _descend(
            grid_start,
            grid_step,
            0.0,
            np.array([mu_star]),
            np.array([mu * factor]),
            q_std,
            f"mu={mu:g}",
        )
    return FrontierTable(
        kind="mu",
        keys=mus,
        values=values,
        confidence=confidence,
        alpha=alpha,
        beta=beta,
        grid_start=grid_start,
        grid_step=grid_step,
    )


def principal_curve(
    n: int,
    confidence_grid,
    alpha: float = 1.89,
    beta: float = 1.0,
    sigma_annual: float = 0.110,
    mu_annual: float = 0.0658,
) -> list[tuple[float, float]]:
    """Necessary principal vs confidence for continuous withdrawals over n years.

    The n-year horizon is rescaled to unit time, turning the annual
    process parameters into sigma * n^(1/alpha) and mu * n; the returned
    principals are per unit of total withdrawal and increase with
    confidence.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    cs = [float(c) for c in confidence_grid]
    if not cs:
        raise ValueError("confidence grid must be nonempty")
    if any(not (0.0 < c < 1.0) for c in cs):
        raise ValueError("confidence levels must lie in (0, 1)")
    process = StableParams(
        alpha, beta, sigma_annual * n ** (1.0 / alpha), mu_annual * n
    )
    sb: StarBound = continuous_star_bound(process)
    std = StableParams(alpha, -beta, 1.0, 0.0)
    out = []
    for c in cs:
        q = quantile(std, c)
        out.append((c, principal_from_standard_quantile(sb, q)))
    return out


@dataclass(frozen=True)
class SurrogateFit:
    """Polynomial surrogate of a frontier surface over (k, alpha).

    For each alpha the ratios are fit to the basis {1, sqrt(k), k^(1/4),
    k^(1/8)}; each of the four coefficients is then fit to {1, alpha, ...,
    alpha^5}.  coefficients[i][j] multiplies alpha^j inside the weight of
    the i-th k-basis function.  The conservative evaluation subtracts the
    largest positive residual so that it never exceeds the fitted surface
    on the grid, as a sufficient-condition surrogate must not.
    """

    coefficients: np.ndarray
    alpha_grid: np.ndarray
    k_grid: np.ndarray
    max_abs_residual: float
    conservative_shift: float

    def evaluate(self, alpha: float, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        f = np.polynomial.polynomial.polyval(alpha, self.coefficients.T)
        basis = np.stack([np.ones_like(k), k**0.5, k**0.25, k**0.125])
        return f @ basis

    def evaluate_conservative(self, alpha: float, k) -> np.ndarray:
        return self.evaluate(alpha, k) - self.conservative_shift


def fit_surrogate(tables: list[FrontierTable]) -> SurrogateFit:
    """Fit the two-stage polynomial surrogate to per-alpha frontier tables.

    Every table must be k-keyed with identical k grids.  Solved with
    orthogonalization-based least squares (never normal equations): the
    alpha-power basis on (1, 2] is too ill-conditioned for them.
    """
    if not tables:
        raise ValueError("need at least one frontier table")
    if any(t.kind != "k" for t in tables):
        raise ValueError("surrogate fitting expects k-keyed tables")
    ks = tables[0].keys
    if any(not np.array_equal(t.keys, ks) for t in tables):
        raise ValueError("all tables must share one k grid")
    alphas = np.array([t.alpha for t in tables])
    if ks.size < 4:
        raise ValueError("rank-deficient fit: need at least 4 k values")
    if alphas.size < 6:
        raise ValueError("rank-deficient fit: need at least 6 alpha values")
    kf = ks.astype(float)
    design_k = np.column_stack([np.ones_like(kf), kf**0.5, kf**0.25, kf**0.125])
    coeff_by_alpha = np.empty((alphas.size, 4))
    for i, t in enumerate(tables):
        coeff_by_alpha[i], *_ = np.linalg.lstsq(design_k, t.values, rcond=None)
    design_a = np.vander(alphas, 6, increasing=True)
    lam = np.empty((4, 6))
    for i in range(4):
        lam[i], *_ = np.linalg.lstsq(design_a, coeff_by_alpha[:, i], rcond=None)
    fit = SurrogateFit(
        coefficients=lam,
        alpha_grid=alphas,
        k_grid=ks,
        max_abs_residual=0.0,
        conservative_shift=0.0,
    )
    preds = np.array([fit.evaluate(a, kf) for a in alphas])
    actual = np.array([t.values for t in tables])
    resid = preds - actual
    return SurrogateFit(
        coefficients=lam,
        alpha_grid=alphas,
        k_grid=ks,
        max_abs_residual=float(np.max(np.abs(resid))),
        conservative_shift=float(max(0.0, np.max(resid))),
    )


def frontier_surface(
    confidence: float,
    beta: float,
    alpha_grid,
    k_values=range(2, 61),
    mu_grid=None,
    grid_start: float = GRID_START,
    grid_step: float = GRID_STEP,
) -> list[FrontierTable]:
    """Discrete frontier tables across a shape grid, for surrogate fitting.

    Per-alpha sweeps are independent; each reuses one standardized
    quantile at the shared confidence level.
    """
    return [
        discrete_frontier(
            confidence,
            float(a),
            beta,
            k_values=k_values,
            mu_grid=mu_grid,
            grid_start=grid_start,
            grid_step=grid_step,
        )
        for a in alpha_grid
    ]
