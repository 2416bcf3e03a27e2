"""Brute-force Monte Carlo oracle for the bound constructions.

Simulates the gross growth factors of a geometric stable process over a
schedule's time grid, replays the exact wealth / balance recursions per
path, and counts violations of the almost-sure claims: the wealth bound
never exceeds terminal wealth, the reversed-recursion bound never
exceeds the break-even principal, and ruin is equivalent to the
break-even principal exceeding the initial investment.

Paths are streamed in fixed-size chunks (constant memory); consumers fold
statistics online.  Shards drawn from spawned seed streams merge
associatively and deterministically given the shard layout.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from math import sqrt
from typing import Iterable, Iterator, Union

import numpy as np

from .bounds import BoundParams, Schedule
from .stable import StableParams, sample
from .withdrawals import StarBound, WithdrawalPlan, success_prob_upper_bound

REL_TOL = 1e-12
_CHUNK = 65536


@dataclass(frozen=True)
class WealthPath:
    """One sampled realization over a schedule's or plan's time grid.

    factors are the per-step gross growth ratios.  Schedule paths carry
    the wealth trajectory and per-step returns (wealth over invested so
    far); plan paths carry the break-even principal, the backward
    balances, and, when the plan has a principal, the forward balances
    after each withdrawal.
    """

    factors: tuple[float, ...]
    wealth: tuple[float, ...] | None = None
    returns: tuple[float, ...] | None = None
    balances: tuple[float, ...] | None = None
    star_principal: float | None = None
    star_balances: tuple[float, ...] | None = None


@dataclass(frozen=True)
class OracleReport:
    """Outcome of one oracle check, mergeable across shards.

    violations are counted at relative tolerance REL_TOL.  empirical_prob
    and std_error are filled by probability estimators; analytic_bound
    carries the matching closed-form value when one exists.
    """

    label: str
    n_paths: int
    violations: int
    seed: object
    empirical_prob: float | None = None
    std_error: float | None = None
    analytic_bound: float | None = None
    successes: int = 0

    def _seed_tuple(self) -> tuple:
        return self.seed if isinstance(self.seed, tuple) else (self.seed,)

    def merge(self, other: "OracleReport") -> "OracleReport":
        """Combine shard reports; associative, so any merge order agrees."""
        if other.label != self.label:
            raise ValueError(f"cannot merge reports {self.label!r} and {other.label!r}")
        n = self.n_paths + other.n_paths
        succ = self.successes + other.successes
        merged = OracleReport(
            label=self.label,
            n_paths=n,
            violations=self.violations + other.violations,
            seed=self._seed_tuple() + other._seed_tuple(),
            analytic_bound=self.analytic_bound,
            successes=succ,
        )
        if self.empirical_prob is not None and n > 0:
            p = succ / n
            merged = replace(
                merged, empirical_prob=p, std_error=sqrt(p * (1.0 - p) / n)
            )
        return merged

    def to_text(self) -> str:
        lines = [
            f"check: {self.label}",
            f"n_paths: {self.n_paths}",
            f"violations: {self.violations}",
            f"seed: {self.seed}",
        ]
        if self.empirical_prob is not None:
            lines.append(f"empirical_prob: {self.empirical_prob:.6f}")
            lines.append(f"std_error: {self.std_error:.6f}")
        if self.analytic_bound is not None:
            lines.append(f"analytic_bound: {self.analytic_bound:.6f}")
        return "\n".join(lines)


def split_seed(seed, n: int) -> list[np.random.SeedSequence]:
    """Spawn n independent child seed streams for concurrent shards."""
    return np.random.SeedSequence(seed).spawn(n)


def _step_laws(process: StableParams, times) -> list[StableParams]:
    a = process.alpha
    laws = []
    for t0, t1 in zip(times, times[1:]):
        dt = t1 - t0
        laws.append(
            StableParams(a, process.beta, process.sigma * dt ** (1.0 / a), process.mu * dt)
        )
    return laws


def _factor_chunks(
    process: StableParams, times, n_paths: int, seed, chunk_size: int
) -> Iterator[np.ndarray]:
    laws = _step_laws(process, times)
    rng = np.random.default_rng(seed)
    done = 0
    while done < n_paths:
        m = min(chunk_size, n_paths - done)
        x = np.empty((m, len(laws)))
        # factors in the extreme tails legitimately overflow to inf /
        # underflow to 0 in double precision
        with np.errstate(over="ignore", under="ignore"):
            for j, law in enumerate(laws):
                x[:, j] = np.exp(sample(law, rng, m))
        done += m
        yield x


def wealth_trajectories(factors: np.ndarray, amounts) -> np.ndarray:
    """Exact wealth recursion Y_k = X_k (Y_{k-1} + c_{k-1}) per path row."""
    n, steps = factors.shape
    y = np.empty_like(factors)
    with np.errstate(over="ignore"):
        y[:, 0] = amounts[0] * factors[:, 0]
        for k in range(1, steps):
            y[:, k] = factors[:, k] * (y[:, k - 1] + amounts[k])
    return y


def star_principals(factors: np.ndarray, amounts) -> tuple[np.ndarray, np.ndarray]:
    """Backward balance recursion; returns (break-even principal, balances).

    balances[:, j-1] holds the backward balance paired with withdrawal j,
    for j = 1..k-1; the chain ends at the principal that would make the
    final forward balance exactly zero.
    """
    n, k = factors.shape
    w = np.asarray(amounts, dtype=float)
    # a zero (underflowed) factor wipes the account: the break-even
    # principal is rightly infinite on that path
    with np.errstate(over="ignore", divide="ignore"):
        cur = w[k - 1] / factors[:, k - 1]
        back = np.empty((n, k - 1)) if k > 1 else np.empty((n, 0))
        for j in range(k - 1, 0, -1):
            back[:, j - 1] = cur
            cur = (cur + w[j - 1]) / factors[:, j - 1]
    return cur, back


def forward_balances(factors: np.ndarray, amounts, principal: float) -> np.ndarray:
    """Exact balance recursion W_j = W_{j-1} X_j - w_j from the principal."""
    n, k = factors.shape
    w = np.asarray(amounts, dtype=float)
    out = np.empty_like(factors)
    with np.errstate(over="ignore"):
        out[:, 0] = principal * factors[:, 0] - w[0]
        for j in range(1, k):
            out[:, j] = out[:, j - 1] * factors[:, j] - w[j]
    return out


def replay_wealth_bound(
    factors: np.ndarray, amounts, bound_steps: list[BoundParams]
) -> np.ndarray:
    """Per-path bound recursion: the power-mean construction on shared draws."""
    n, steps = factors.shape
    z = np.empty_like(factors)
    with np.errstate(over="ignore"):
        z[:, 0] = amounts[0] * factors[:, 0]
        for k in range(2, steps + 1):
            bp = bound_steps[k - 1]
            z[:, k - 1] = (
                factors[:, k - 1]
                * (bp.a + amounts[k - 1])
                * (z[:, k - 2] / bp.a) ** bp.b
            )
    return z


def replay_star_bound(factors: np.ndarray, amounts, sb: StarBound) -> np.ndarray:
    """Per-path backward bound recursion down to the break-even principal."""
    n, k = factors.shape
    w = np.asarray(amounts, dtype=float)
    with np.errstate(over="ignore", divide="ignore"):
        z = w[k - 1] / factors[:, k - 1]
        for j in range(k - 1, 0, -1):
            a, b = sb.step_a[j - 1], sb.step_b[j - 1]
            z = (a + w[j - 1]) * (z / a) ** b / factors[:, j - 1]
    return z


def simulate_paths(
    process: StableParams,
    sched_or_plan: Union[Schedule, WithdrawalPlan],
    n_paths: int,
    seed,
    chunk_size: int = _CHUNK,
) -> Iterator[WealthPath]:
    """Stream sampled paths with the exact recursions evaluated per path.

    Each growth factor is exp of a stable increment with scale
    sigma * dt^(1/alpha) and location mu * dt over its time step, drawn
    independently across steps (the stationary-increment scaling of the
    process, including alpha = 1).
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    if isinstance(sched_or_plan, Schedule):
        sched = sched_or_plan
        totals = np.array([sched.total_invested(k) for k in range(1, sched.steps + 1)])
        for x in _factor_chunks(process, sched.times, n_paths, seed, chunk_size):
            y = wealth_trajectories(x, sched.amounts)
            r = y / totals
            for i in range(x.shape[0]):
                yield WealthPath(
                    factors=tuple(x[i].tolist()),
                    wealth=tuple(y[i].tolist()),
                    returns=tuple(r[i].tolist()),
                )
    else:
        plan = sched_or_plan
        times = (0.0,) + plan.times
        for x in _factor_chunks(process, times, n_paths, seed, chunk_size):
            pstar, back = star_principals(x, plan.amounts)
            bal = (
                forward_balances(x, plan.amounts, plan.principal)
                if plan.principal is not None
                else None
            )
            for i in range(x.shape[0]):
                yield WealthPath(
                    factors=tuple(x[i].tolist()),
                    balances=tuple(bal[i].tolist()) if bal is not None else None,
                    star_principal=float(pstar[i]),
                    star_balances=tuple(back[i].tolist()),
                )


def _blocks(paths: Iterable[WealthPath], size: int = 8192) -> Iterator[list[WealthPath]]:
    block: list[WealthPath] = []
    for p in paths:
        block.append(p)
        if len(block) >= size:
            yield block
            block = []
    if block:
        yield block


def check_domination(
    paths: Iterable[WealthPath],
    sched_or_plan: Union[Schedule, WithdrawalPlan],
    bound: Union[list[BoundParams], StarBound],
    seed=None,
    rel_tol: float = REL_TOL,
    bound_scale: float = 1.0,
) -> OracleReport:
    """Count violations of the almost-sure bound along the streamed paths.

    Schedule case: the replayed bound must satisfy Z_k <= Y_k at every
    step; plan case: Z*_0 <= P*.  bound_scale multiplies the replayed
    bound and exists as the negative-control knob: any value above 1
    must produce violations (the bound is tight at the base step).
    """
    is_plan = isinstance(sched_or_plan, WithdrawalPlan)
    violations = 0
    n = 0
    for block in _blocks(paths):
        x = np.array([p.factors for p in block])
        if is_plan:
            pstar = np.array([p.star_principal for p in block])
            z0 = bound_scale * replay_star_bound(x, sched_or_plan.amounts, bound)
            violations += int(np.sum(z0 > pstar + rel_tol * np.abs(pstar)))
        else:
            y = wealth_trajectories(x, sched_or_plan.amounts)
            z = bound_scale * replay_wealth_bound(x, sched_or_plan.amounts, bound)
            violations += int(np.sum(np.any(z > y + rel_tol * np.abs(y), axis=1)))
        n += len(block)
    label = "star_domination" if is_plan else "wealth_domination"
    return OracleReport(label=label, n_paths=n, violations=violations, seed=seed)


def check_withdrawal_duality(
    paths: Iterable[WealthPath], plan: WithdrawalPlan, seed=None
) -> OracleReport:
    """Verify per path that ruin is exactly "break-even principal > principal".

    The final balance is strictly increasing in the initial investment,
    so W_k < 0 iff P* > P; the boundary W_k = 0 counts as success.
    """
    if plan.principal is None:
        raise ValueError("duality check needs a plan with a principal")
    violations = 0
    n = 0
    for block in _blocks(paths):
        wk = np.array([p.balances[-1] for p in block])
        pstar = np.array([p.star_principal for p in block])
        ruin = wk < 0.0
        star_side = pstar > plan.principal
        violations += int(np.sum(ruin != star_side))
        n += len(block)
    return OracleReport(
        label="withdrawal_duality", n_paths=n, violations=violations, seed=seed
    )


def estimate_success_prob(
    process: StableParams,
    plan: WithdrawalPlan,
    n_paths: int,
    seed,
    star: StarBound | None = None,
    chunk_size: int = _CHUNK,
) -> OracleReport:
    """Empirical probability of completing all withdrawals, with its bound.

    Reports the fraction of paths with a nonnegative final balance, the
    binomial standard error, and the analytic upper bound from the
    star-bound law evaluated at the plan's principal.
    """
    if plan.principal is None:
        raise ValueError("success probability needs a plan with a principal")
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    successes = 0
    times = (0.0,) + plan.times
    for x in _factor_chunks(process, times, n_paths, seed, chunk_size):
        bal = forward_balances(x, plan.amounts, plan.principal)
        successes += int(np.sum(bal[:, -1] >= 0.0))
    p = successes / n_paths
    analytic = None
    if star is not None:
        analytic = success_prob_upper_bound(star, plan.principal)
    return OracleReport(
        label="success_probability",
        n_paths=n_paths,
        violations=0,
        seed=seed,
        empirical_prob=p,
        std_error=sqrt(p * (1.0 - p) / n_paths),
        analytic_bound=analytic,
        successes=successes,
    )
