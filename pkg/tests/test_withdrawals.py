"""Withdrawal transform, star bounds, and necessary-principal inversion."""

import numpy as np
import pytest
from math import exp, log, sqrt

from stablewealth.bounds import bound_continuous, bound_dca_closed_form
from stablewealth.stable import StableParams, cdf, quantile, sample
from stablewealth.withdrawals import (
    WithdrawalPlan,
    continuous_star_bound,
    equal_plan,
    necessary_principal,
    reversed_process,
    reversed_schedule,
    star_bound_closed_form,
    star_bound_general,
    success_prob_upper_bound,
)

SP = StableParams(1.89, 1.0, 0.110, 0.0658)


class TestPlan:
    def test_validation(self):
        with pytest.raises(ValueError):
            WithdrawalPlan((), ())
        with pytest.raises(ValueError):
            WithdrawalPlan((0.0, 1.0), (1.0, 1.0))
        with pytest.raises(ValueError):
            WithdrawalPlan((2.0, 1.0), (1.0, 1.0))
        with pytest.raises(ValueError):
            WithdrawalPlan((1.0,), (-1.0,))
        with pytest.raises(ValueError):
            WithdrawalPlan((1.0,), (1.0,), principal=-3.0)

    def test_zero_principal_allowed(self):
        # "cannot withdraw from nothing" needs a representable P = 0
        plan = WithdrawalPlan((1.0,), (1.0,), principal=0.0)
        assert plan.principal == 0.0

    def test_equal_plan(self):
        p = equal_plan(3, amount=2.0, principal=7.0)
        assert p.times == (1.0, 2.0, 3.0)
        assert p.amounts == (2.0, 2.0, 2.0)
        assert p.total() == 6.0


class TestReversal:
    def test_reversed_process(self):
        r = reversed_process(SP)
        assert (r.alpha, r.beta, r.sigma, r.mu) == (1.89, -1.0, 0.110, -0.0658)

    def test_reversed_schedule_increments(self):
        plan = WithdrawalPlan((1.0, 2.5, 3.0), (4.0, 5.0, 6.0))
        sched = reversed_schedule(plan)
        assert sched.times == (0.0, 0.5, 2.0, 3.0)
        assert sched.amounts[:3] == (6.0, 5.0, 4.0)


class TestStarBoundGeneral:
    def test_base_unit(self):
        sb = star_bound_general(SP, equal_plan(1))
        assert sb.sigma0 == pytest.approx(0.110)
        assert sb.mu0 == pytest.approx(-0.0658)
        assert sb.skew == -1.0

    def test_base_scaled_amount(self):
        # withdrawing w shifts the log break-even principal by log(w)
        p = StableParams(1.5, 0.3, 0.2, 0.05)
        sb = star_bound_general(p, WithdrawalPlan((4.0,), (2.0,)))
        assert sb.sigma0 == pytest.approx(0.2 * 4 ** (1 / 1.5))
        assert sb.mu0 == pytest.approx(-4 * 0.05 + log(2.0))
        assert sb.skew == -0.3

    def test_base_law_matches_simulation(self, rng):
        p = StableParams(1.6, 0.4, 0.2, 0.05)
        sb = star_bound_general(p, WithdrawalPlan((4.0,), (2.0,)))
        inc = StableParams(1.6, 0.4, 0.2 * 4 ** (1 / 1.6), 0.05 * 4)
        log_pstar = np.log(2.0) - sample(inc, rng, 50_000)
        for x in (-1.0, 0.4, 1.5):
            emp = np.mean(log_pstar <= x)
            assert emp == pytest.approx(cdf(sb.law(), x), abs=4 * 0.5 / sqrt(50_000))

    def test_matches_closed_form(self):
        sb = star_bound_general(SP, equal_plan(10))
        cf = star_bound_closed_form(SP, 10)
        assert sb.sigma0 == pytest.approx(cf.sigma0, abs=1e-12)
        assert sb.mu0 == pytest.approx(cf.mu0, abs=1e-12)

    def test_step_constants_recorded(self):
        sb = star_bound_general(SP, equal_plan(5))
        assert len(sb.step_a) == 4 and len(sb.step_b) == 4
        assert all(a > 0 for a in sb.step_a)
        assert all(0 < b < 1 for b in sb.step_b)


class TestStarClosedForm:
    def test_k1(self):
        sb = star_bound_closed_form(SP, 1)
        assert (sb.mu0, sb.sigma0) == (pytest.approx(-0.0658), pytest.approx(0.110))

    def test_mirror_of_wealth_closed_form(self, rng):
        for _ in range(15):
            p = StableParams(
                rng.uniform(1.01, 2.0),
                rng.uniform(-1, 1),
                rng.uniform(0.01, 1.0),
                rng.choice([-1, 1]) * rng.uniform(0.01, 0.5),
            )
            k = int(rng.integers(1, 40))
            sb = star_bound_closed_form(p, k)
            mirror = bound_dca_closed_form(
                StableParams(p.alpha, -p.beta, p.sigma, -p.mu), k
            )
            assert sb.sigma0 == mirror.sigma
            assert sb.mu0 == mirror.mu
            assert sb.skew == -p.beta

    def test_sixteen_withdrawals_need_sixteen_units(self):
        # the fitted index process forces P >= k at 95% for k up to 16
        sb = star_bound_closed_form(SP, 16)
        q = quantile(StableParams(1.89, -1.0, 1.0, 0.0), 0.95)
        assert exp(sb.mu0 + sb.sigma0 * q) >= 16.0

    def test_rejects_alpha_one(self):
        with pytest.raises(ValueError):
            star_bound_closed_form(StableParams(1.0, 0.0, 1.0, 0.1), 5)


class TestSuccessBound:
    def test_limits(self):
        # the bound law's left tail is the heavy power-law side, so the
        # vanishing-principal limit decays polynomially, not exponentially
        sb = star_bound_closed_form(SP, 10)
        lo = [success_prob_upper_bound(sb, p) for p in (1e-3, 1e-6, 1e-12)]
        assert lo[0] > lo[1] > lo[2]
        assert lo[2] < 1e-4
        assert success_prob_upper_bound(sb, 1e12) > 1 - 1e-6

    def test_rejects_nonpositive(self):
        sb = star_bound_closed_form(SP, 10)
        for bad in (0.0, -1.0):
            with pytest.raises(ValueError):
                success_prob_upper_bound(sb, bad)


class TestNecessaryPrincipal:
    def test_symmetric_median(self):
        p = StableParams(1.7, 0.0, 0.2, 0.05)
        sb = star_bound_closed_form(p, 5)
        assert necessary_principal(sb, 0.5) == pytest.approx(exp(sb.mu0), rel=1e-8)

    def test_round_trip(self):
        sb = star_bound_closed_form(SP, 8)
        for c in (0.6, 0.9, 0.99):
            P = necessary_principal(sb, c)
            assert success_prob_upper_bound(sb, P) == pytest.approx(c, abs=1e-7)

    def test_strictly_increasing(self):
        sb = star_bound_closed_form(SP, 8)
        ps = [necessary_principal(sb, c) for c in (0.6, 0.7, 0.8, 0.9, 0.95)]
        assert all(b > a for a, b in zip(ps, ps[1:]))

    def test_rejects_bad_confidence(self):
        sb = star_bound_closed_form(SP, 8)
        for bad in (0.0, 1.0, -0.5):
            with pytest.raises(ValueError):
                necessary_principal(sb, bad)

    def test_two_year_continuous_at_99(self):
        n = 2
        scaled = StableParams(1.89, 1.0, 0.110 * n ** (1 / 1.89), 0.0658 * n)
        sb = continuous_star_bound(scaled)
        assert necessary_principal(sb, 0.99) >= 1.0

    def test_fortytwo_year_continuous_at_60(self):
        n = 42
        scaled = StableParams(1.89, 1.0, 0.110 * n ** (1 / 1.89), 0.0658 * n)
        sb = continuous_star_bound(scaled)
        assert necessary_principal(sb, 0.60) >= 1.0 / 3.0

    def test_alpha_one_round_trip(self):
        # the affine quantile map must carry the alpha = 1 correction
        p = StableParams(1.0, 0.6, 0.2, 0.05)
        sb = star_bound_general(p, equal_plan(4))
        P = necessary_principal(sb, 0.8)
        assert success_prob_upper_bound(sb, P) == pytest.approx(0.8, abs=1e-6)


class TestContinuousStarBound:
    def test_equals_negated_continuous_bound(self):
        sb = continuous_star_bound(SP)
        cb = bound_continuous(StableParams(1.89, -1.0, 0.110, -0.0658))
        assert sb.sigma0 == cb.sigma_star
        assert sb.mu0 == cb.mu_star
        assert sb.skew == -1.0

    def test_small_drift_location(self):
        sb = continuous_star_bound(StableParams(1.89, 1.0, 0.1, 1e-8))
        assert abs(sb.mu0) < 1e-6

    def test_principal_monotone_in_confidence(self):
        scaled = StableParams(1.89, 1.0, 0.110 * 12 ** (1 / 1.89), 0.0658 * 12)
        sb = continuous_star_bound(scaled)
        ps = [necessary_principal(sb, c) for c in (0.60, 0.70, 0.80, 0.90, 0.99)]
        assert all(b > a for a, b in zip(ps, ps[1:]))
