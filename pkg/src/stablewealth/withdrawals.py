"""Upper bounds on the probability of completing a withdrawal schedule.

An initial investment P funds withdrawals w_j at times t_j; the balance
evolves as W_j = W_{j-1} * X_j - w_j.  Running the recursion backwards
expresses the random principal P* that would make the final balance
exactly zero:

    W*_{k-1} = w_k / X_k,   W*_{j-1} = (W*_j + w_j) / X_j,   P* = (W*_1 + w_1) / X_1,

so P* is the terminal wealth of an investment schedule driven by the
reciprocal growth factors, whose log-increments are stable with skewness
-beta and drift -mu.  The wealth bound machinery therefore yields a
log-stable Z*_0 <= P* almost surely, and since ruin is equivalent to
P* > P,

    P(all k withdrawals succeed) = P(P* <= P) <= P(Z*_0 <= P).

Inverting the right side at a confidence level gives a necessary initial
principal: any smaller investment succeeds with lower probability.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, log

from .bounds import (
    BoundParams,
    ContinuousBound,
    Schedule,
    bound_continuous,
    bound_dca_closed_form,
    bound_general,
)
from .stable import (
    StableParams,
    cdf,
    location_for_standard_quantile,
    quantile,
)


@dataclass(frozen=True)
class WithdrawalPlan:
    """Withdrawal times and amounts after an initial investment at time 0.

    The bound construction does not touch the principal, so it is
    optional here; the Monte Carlo balance recursion requires it.
    """

    times: tuple[float, ...]
    amounts: tuple[float, ...]
    principal: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "amounts", tuple(float(w) for w in self.amounts))
        if len(self.times) != len(self.amounts):
            raise ValueError("times and amounts must have matching lengths")
        if len(self.times) < 1:
            raise ValueError("plan needs at least one withdrawal")
        if self.times[0] <= 0.0:
            raise ValueError("first withdrawal must occur after time 0")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("times must be strictly increasing")
        if any(w <= 0.0 for w in self.amounts):
            raise ValueError("amounts must be positive")
        if self.principal is not None and not self.principal >= 0.0:
            raise ValueError(f"principal must be nonnegative, got {self.principal}")

    @property
    def count(self) -> int:
        return len(self.times)

    def total(self) -> float:
        return float(sum(self.amounts))


def equal_plan(k: int, amount: float = 1.0, principal: float | None = None) -> WithdrawalPlan:
    """Equal withdrawals at times 1, 2, ..., k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return WithdrawalPlan(tuple(range(1, k + 1)), (amount,) * k, principal)


@dataclass(frozen=True)
class StarBound:
    """Parameters of the log-stable lower bound on the break-even principal.

    log Z*_0 ~ S(alpha, skew, sigma0, mu0) with skew = -beta of the asset
    process.  step_a / step_b record the free constants of the backward
    power-mean steps (index j = 1..k-1), for per-path replay.
    """

    alpha: float
    skew: float
    sigma0: float
    mu0: float
    step_a: tuple[float, ...] = ()
    step_b: tuple[float, ...] = ()

    def law(self) -> StableParams:
        return StableParams(self.alpha, self.skew, self.sigma0, self.mu0)


def reversed_process(process: StableParams) -> StableParams:
    """Law parameters of the reciprocal growth factors' log-increments."""
    return StableParams(process.alpha, -process.beta, process.sigma, -process.mu)


def reversed_schedule(plan: WithdrawalPlan) -> Schedule:
    """Investment schedule equivalent to the backward withdrawal recursion.

    Withdrawal j maps to an investment of w_{k-i} at reversed time
    t_k - t_{k-i}, so time increments are consumed in reverse order.
    """
    k = plan.count
    t_end = plan.times[-1]
    times = [0.0] + [t_end - plan.times[k - 1 - i] for i in range(1, k)] + [t_end]
    # final amount is the unused terminal-time investment slot
    amounts = [plan.amounts[k - 1 - i] for i in range(k)] + [plan.amounts[0]]
    return Schedule(tuple(times), tuple(amounts))


def star_bound_general(
    process: StableParams, plan: WithdrawalPlan, a_rule=None
) -> StarBound:
    """Backward-recursion bound on the break-even principal.

    Delegates to the forward wealth recursion on the reversed process and
    reversed schedule, which reproduces the backward recursion step for
    step (including both alpha = 1 correction branches).
    """
    steps = bound_general(reversed_process(process), reversed_schedule(plan), a_rule)
    last = steps[-1]
    # steps[i] consumed withdrawal w_{k-i}; step_a[j-1] must hold the
    # constant paired with withdrawal j+1 of the backward recursion.
    a_fwd = [s.a for s in steps[1:]]
    b_fwd = [s.b for s in steps[1:]]
    return StarBound(
        alpha=last.alpha,
        skew=last.beta,
        sigma0=last.sigma,
        mu0=last.mu,
        step_a=tuple(reversed(a_fwd)),
        step_b=tuple(reversed(b_fwd)),
    )


def star_bound_closed_form(process: StableParams, k: int) -> StarBound:
    """Closed form for unit withdrawals at times 1, 2, ..., k.

    Mirror image of the equal-investment closed form: evaluate it with mu
    negated and flip the skew.  Requires alpha != 1 and mu != 0.
    """
    mirrored = bound_dca_closed_form(reversed_process(process), k)
    return StarBound(
        alpha=mirrored.alpha,
        skew=mirrored.beta,
        sigma0=mirrored.sigma,
        mu0=mirrored.mu,
    )


def continuous_star_bound(process: StableParams) -> StarBound:
    """Bound for withdrawing at a constant rate, unit total over unit time."""
    cb: ContinuousBound = bound_continuous(reversed_process(process))
    return StarBound(
        alpha=cb.alpha,
        skew=cb.beta,
        sigma0=cb.sigma_star,
        mu0=cb.mu_star,
    )


def success_prob_upper_bound(sb: StarBound, principal: float) -> float:
    """Upper bound on the probability that every withdrawal succeeds.

    P(success) <= P(Z*_0 <= principal) = F(log principal) under the bound
    law.  Tends to 0 as the principal vanishes and to 1 as it grows.
    """
    if principal <= 0.0:
        raise ValueError(f"principal must be positive, got {principal}")
    return cdf(sb.law(), log(principal))


def necessary_principal(sb: StarBound, confidence: float) -> float:
    """Smallest principal whose success bound reaches the given confidence.

    Solves confidence = P(Z*_0 <= P): any initial investment below the
    returned value has success probability strictly below the confidence
    level.  Computed as exp of the confidence-quantile of the bound law;
    for alpha != 1 that is exp(mu0 + sigma0 * q) with q the standardized
    quantile, which callers sweeping many (sigma0, mu0) pairs can reuse.
    """
    if not (0.0 < confidence < 1.0):
        raise ValueError(f"confidence must be in (0, 1), got {confidence}")
    q = quantile(StableParams(sb.alpha, sb.skew, 1.0, 0.0), confidence)
    return principal_from_standard_quantile(sb, q)


def principal_from_standard_quantile(sb: StarBound, q_std: float) -> float:
    """Necessary principal given the standardized quantile of S(alpha, skew, 1, 0)."""
    return exp(location_for_standard_quantile(sb.law(), q_std))
