"""Log-stable lower bounds on the terminal wealth of investment schedules.

Terminal wealth of a schedule that invests c_k at time t_k compounds as
Y_k = X_k * (Y_{k-1} + c_{k-1}) with Y_1 = c_0 * X_1, where the X_k are
the gross growth factors of a geometric stable process.  The additive
step Y + c is replaced by the weighted power mean
(a + c) * (Y / a)^(a / (a + c)), which never exceeds Y + c and is exact
at Y = a.  The replacement turns the recursion into a product of powers
of log-stable factors, so the bound Z_k stays log-stable with
parameters that follow by the affine and convolution closure rules.

Three forms are provided: the general recursion for arbitrary schedules,
a closed form for unit investments at unit spacing, and the continuous
limit of ever-finer equal investments over [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, expm1, isfinite, log, log1p, pi

import numpy as np

from .quadrature import QuadratureError, romberg_unit
from .stable import StableParams

_CONTINUOUS_TOL = 1e-12


def log_expm1_abs(y):
    """log|exp(y) - 1|, overflow-safe for large positive y; vectorized."""
    arr = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.empty_like(arr)
    big = arr > 0.69
    neg = arr < 0.0
    mid = ~big & ~neg
    out[big] = arr[big] + np.log1p(-np.exp(-arr[big]))
    out[mid] = np.log(np.expm1(arr[mid]))
    out[neg] = np.log(-np.expm1(arr[neg]))
    return out if np.ndim(y) else float(out[0])


@dataclass(frozen=True)
class Schedule:
    """Investment times and amounts; times[0] = 0, strictly increasing."""

    times: tuple[float, ...]
    amounts: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "amounts", tuple(float(c) for c in self.amounts))
        if len(self.times) != len(self.amounts):
            raise ValueError("times and amounts must have matching lengths")
        if len(self.times) < 2:
            raise ValueError("schedule needs at least two time points")
        if self.times[0] != 0.0:
            raise ValueError("schedule must start at t_0 = 0")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        if any(c <= 0.0 for c in self.amounts):
            raise ValueError("amounts must be positive")

    @property
    def steps(self) -> int:
        """Number of bound steps, i.e. the terminal index K."""
        return len(self.times) - 1

    def total_invested(self, k: int) -> float:
        """Sum of amounts committed strictly before time t_k."""
        return float(sum(self.amounts[:k]))


def dca_schedule(k: int, amount: float = 1.0) -> Schedule:
    """Equal amounts at times 0, 1, ..., k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return Schedule(tuple(range(k + 1)), (amount,) * (k + 1))


@dataclass(frozen=True)
class BoundParams:
    """Parameters of the log-stable bound at one step.

    log Z_k ~ S(alpha, beta, sigma, mu).  For k >= 2 the free constant a,
    the exponent b = a / (a + c) of the power-mean step, and the
    pre-correction location m are recorded; the base step k = 1 has none.
    """

    k: int
    alpha: float
    beta: float
    sigma: float
    mu: float
    m: float | None = None
    a: float | None = None
    b: float | None = None

    def law(self) -> StableParams:
        return StableParams(self.alpha, self.beta, self.sigma, self.mu)


def _resolve_a(a_rule, step_index: int, mu_prev: float) -> float:
    if a_rule is None:
        return exp(mu_prev)
    if callable(a_rule):
        a = float(a_rule(step_index, mu_prev))
    else:
        a = float(a_rule[step_index - 2])
    if not (a > 0.0 and isfinite(a)):
        raise ValueError(f"free constant a must be positive and finite, got {a}")
    return a


def bound_general(
    process: StableParams, sched: Schedule, a_rule=None
) -> list[BoundParams]:
    """Bound parameters (sigma_k, mu_k) for k = 1..K of the schedule.

    a_rule chooses the free constants of the power-mean steps: None uses
    a = exp(mu_{k-1}), which maximizes the location recursion; otherwise
    pass a sequence of positive constants (one per step k = 2..K) or a
    callable (k, mu_prev) -> a.

    Base case: log(c_0 * X_1) = log(c_0) + log(X_1), an additive shift of
    a stable variable, so sigma_1 = sigma * t_1^(1/alpha) and
    mu_1 = mu * t_1 + log(c_0).  (A multiplier on wealth is a shift of
    log-wealth, not a scaling of it; with unit amounts this reduces to
    the familiar sigma_1 = sigma, mu_1 = mu.)  The power-mean steps carry
    the alpha = 1 location correction of the 1-type parameterization.
    """
    alpha, beta, sigma, mu = process.alpha, process.beta, process.sigma, process.mu
    c = sched.amounts
    t = sched.times
    out: list[BoundParams] = []
    sig_k = sigma * t[1] ** (1.0 / alpha)
    mu_k = mu * t[1] + log(c[0])
    out.append(BoundParams(1, alpha, beta, sig_k, mu_k))
    for k in range(2, sched.steps + 1):
        a = _resolve_a(a_rule, k, mu_k)
        ck = c[k - 1]
        b = a / (a + ck)
        dt = t[k] - t[k - 1]
        m = b * (mu_k - log(a)) + log(a + ck) + mu * dt
        mu_k = m
        if alpha == 1.0:
            mu_k -= (2.0 / pi) * beta * b * sig_k * log(b)
        sig_a = (b * sig_k) ** alpha + sigma**alpha * dt
        sig_k = sig_a ** (1.0 / alpha)
        out.append(BoundParams(k, alpha, beta, sig_k, mu_k, m=m, a=a, b=b))
    return out


def bound_dca_closed_form(process: StableParams, k: int) -> BoundParams:
    """Terminal bound parameters for unit investments at times 0, 1, ..., k.

    With the location-maximizing free constants the recursion telescopes:

        mu_k      = mu + log((e^(mu k) - 1) / (e^mu - 1))
        sigma_k^a = sigma^a * (1 + sum_{j=1}^{k-1} (1 - (e^(mu j) - 1)/(e^(mu k) - 1))^a)

    Evaluated in log space so that mu*k far beyond 700 stays finite.
    Requires alpha != 1 and mu != 0.
    """
    alpha, beta, sigma, mu = process.alpha, process.beta, process.sigma, process.mu
    if alpha == 1.0:
        raise ValueError("closed form requires alpha != 1; use bound_general")
    if mu == 0.0:
        raise ValueError("closed form requires mu != 0; use bound_general")
    if k < 1:
        raise ValueError("k must be >= 1")
    mu_k = mu + log_expm1_abs(mu * k) - log_expm1_abs(mu)
    j = np.arange(1, k)
    # (1 - (e^(mu j)-1)/(e^(mu k)-1)) = (e^(-mu(k-j)) - 1)/(e^(-mu k) - 1)
    log_terms = log_expm1_abs(-mu * (k - j)) - log_expm1_abs(-mu * k)
    sig_a = sigma**alpha * (1.0 + float(np.sum(np.exp(alpha * log_terms))))
    return BoundParams(k, alpha, beta, sig_a ** (1.0 / alpha), float(mu_k))


@dataclass(frozen=True)
class ContinuousBound:
    """Bound for the continuous equal-rate schedule over unit time.

    log Z ~ S(alpha, beta, sigma_star, mu_star).  chi is the sign flag of
    the drift (+1 for mu >= 0), r = mu / (e^mu - 1), and integral is the
    computed value of int_0^1 ((1 - e^(-mu x)) / (1 - e^(-mu)))^alpha dx,
    guaranteed to lie in [bracket_lo, bracket_hi].
    """

    alpha: float
    beta: float
    mu_star: float
    sigma_star: float
    chi: int
    r: float
    integral: float
    bracket_lo: float
    bracket_hi: float

    def law(self) -> StableParams:
        return StableParams(self.alpha, self.beta, self.sigma_star, self.mu_star)


def continuous_scale_integral(
    alpha: float, mu: float, tol: float = _CONTINUOUS_TOL
) -> float:
    """Romberg value of int_0^1 ((1 - e^(-mu x)) / (1 - e^(-mu)))^alpha dx."""
    if mu == 0.0:
        raise ValueError("mu must be nonzero")
    log_denom = log_expm1_abs(-mu)

    def integrand(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0.0
        out[pos] = np.exp(alpha * (log_expm1_abs(-mu * x[pos]) - log_denom))
        return out

    return romberg_unit(integrand, tol=tol)


def bound_continuous(
    process: StableParams, tol: float = _CONTINUOUS_TOL
) -> ContinuousBound:
    """Continuous-limit bound parameters for the unit-total, unit-time schedule.

    mu_star = log((e^mu - 1) / mu); sigma_star^alpha scales sigma^alpha by
    the [0, 1] integral computed with Romberg integration.  The analytic
    bracket chi/(alpha+1) <= chi*I <= chi/(r*alpha+1) is evaluated and the
    integral is verified to lie inside it.
    """
    alpha, mu = process.alpha, process.mu
    if alpha == 1.0:
        raise ValueError("continuous bound requires alpha != 1")
    if mu == 0.0:
        raise ValueError("continuous bound requires mu != 0")
    mu_star = float(log_expm1_abs(mu)) - log(abs(mu))
    integral = continuous_scale_integral(alpha, mu, tol=tol)
    chi = 1 if mu > 0 else -1
    r = mu / expm1(mu)
    ends = (1.0 / (alpha + 1.0), 1.0 / (r * alpha + 1.0))
    bracket_lo, bracket_hi = min(ends), max(ends)
    if not (bracket_lo - 1e-9 <= integral <= bracket_hi + 1e-9):
        raise QuadratureError(
            f"continuous-schedule integral {integral} escaped its analytic "
            f"bracket [{bracket_lo}, {bracket_hi}] (alpha={alpha}, mu={mu})"
        )
    sigma_star = process.sigma * integral ** (1.0 / alpha)
    return ContinuousBound(
        alpha=alpha,
        beta=process.beta,
        mu_star=mu_star,
        sigma_star=sigma_star,
        chi=chi,
        r=r,
        integral=integral,
        bracket_lo=bracket_lo,
        bracket_hi=bracket_hi,
    )


def xxr_bracket(mu: float, x: float) -> tuple[float, float]:
    """Analytic bracket around 1 - e^(-mu x) on x in [0, 1].

    Returns ((1 - e^(-mu)) * x, (1 - e^(-mu)) * x^r) with r = mu/(e^mu - 1).
    The target is concave in x for either drift sign, so the chord and the
    power chord enclose it as (lower, upper) for every mu != 0, with
    equality at x = 0 and x = 1.  Dividing through by 1 - e^(-mu), which
    is negative for mu < 0, produces the sign-flipped orientation of the
    normalized-integrand bracket used by the continuous bound.
    """
    if mu == 0.0:
        raise ValueError("mu must be nonzero")
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"x must lie in [0, 1], got {x}")
    scale = -expm1(-mu)
    r = mu / expm1(mu)
    return (scale * x, scale * x**r)


def returns_from_bound(b: BoundParams, sched: Schedule) -> StableParams:
    """Law of the log lower bound on returns, i.e. wealth over total invested.

    Dividing the wealth bound by the total invested before t_k shifts the
    location by -log(sum of amounts); the law is invariant to rescaling
    every amount by a common factor.
    """
    if not (1 <= b.k <= sched.steps):
        raise ValueError(f"bound index {b.k} does not match schedule of {sched.steps} steps")
    total = sched.total_invested(b.k)
    return StableParams(b.alpha, b.beta, b.sigma, b.mu - log(total))
