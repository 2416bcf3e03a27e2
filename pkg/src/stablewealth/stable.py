"""Levy alpha-stable distribution engine.

Parameterization is the classical "1-type" convention (Samorodnitsky &
Taqqu): a law S(alpha, beta, sigma, mu) has characteristic function

    Phi(t) = exp{ i*t*mu - |sigma*t|^alpha * (1 - i*beta*sign(t)*tan(pi*alpha/2)) }   alpha != 1
    Phi(t) = exp{ i*t*mu - |sigma*t| * (1 + i*beta*(2/pi)*sign(t)*log|t|) }           alpha == 1

This convention is kept throughout (no internal conversion to a
continuous-at-alpha-1 convention) because the bound recursions carry
explicit alpha = 1 correction terms that assume it.

Provided operations: characteristic function, affine closure and
convolution closure (Nolan, "Univariate Stable Distributions", Thm 1.2),
CDF/PDF by numerical inversion of the characteristic function
(Gil-Pelaez), quantile by bracketed bisection, and random variates by the
Chambers-Mallows-Stuck transformation (JASA 71, 1976).

Accuracy notes: the CDF targets ~1e-8 absolute error in the central
region and degrades in extreme tails where the inversion integrand
oscillates fastest (very large |x| combined with alpha near 1 and |beta|
near 1).  Shapes alpha <= 0.3 are outside the supported regime: the
inversion integrand decays too slowly there for the default tolerances.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import atan, cos, exp, isfinite, log, pi, sin, sqrt, tan

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gamma as _gamma_fn
from scipy.special import ndtr, ndtri

from .quadrature import QuadratureError

# exp(-_LOG_TINY) is below double precision resolution of the integrals
_LOG_TINY = 41.5
# treat alpha above this as exactly Gaussian (integrand degenerates)
_GAUSS_ALPHA = 2.0 - 1e-9
# default tolerances; every public entry point takes overrides
DEFAULT_QUAD_TOL = 1e-10
DEFAULT_QUANTILE_TOL = 1e-8


@dataclass(frozen=True)
class StableParams:
    """Stable law S(alpha, beta, sigma, mu) in the 1-type convention.

    alpha: shape in (0, 2].  alpha = 2 is Gaussian with mean mu and
        variance 2*sigma^2 (beta is irrelevant there).
    beta: skewness in [-1, 1].
    sigma: scale, > 0.
    mu: location.  Equals the mean when alpha > 1.
    """

    alpha: float
    beta: float
    sigma: float
    mu: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise ValueError(f"alpha must be in (0, 2], got {self.alpha}")
        if not (-1.0 <= self.beta <= 1.0):
            raise ValueError(f"beta must be in [-1, 1], got {self.beta}")
        if not (self.sigma > 0.0 and isfinite(self.sigma)):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")
        if not isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu}")

    @property
    def sharpe_ratio(self) -> float:
        """Location over scale, mu / sigma."""
        return self.mu / self.sigma

    def support_bounds(self) -> tuple[float, float]:
        """Support interval of the law.

        For alpha < 1 with beta = +1 the law is totally right-skewed and
        supported on [mu, inf); beta = -1 mirrors to (-inf, mu].  All
        other parameter combinations have full support.
        """
        if self.alpha < 1.0 and self.beta == 1.0:
            return (self.mu, np.inf)
        if self.alpha < 1.0 and self.beta == -1.0:
            return (-np.inf, self.mu)
        return (-np.inf, np.inf)


def char_fn(p: StableParams, theta):
    """Characteristic function Phi(theta); vectorized over theta."""
    theta = np.asarray(theta, dtype=float)
    at = np.abs(p.sigma * theta)
    sign = np.sign(theta)
    if p.alpha != 1.0:
        skew = 1.0 - 1j * p.beta * sign * tan(pi * p.alpha / 2.0)
        ex = 1j * theta * p.mu - at**p.alpha * skew
    else:
        logth = np.where(theta == 0.0, 0.0, np.log(np.abs(theta)))
        skew = 1.0 + 1j * p.beta * (2.0 / pi) * sign * logth
        ex = 1j * theta * p.mu - at * skew
    out = np.exp(ex)
    return complex(out) if out.ndim == 0 else out


def affine(p: StableParams, a: float, b: float) -> StableParams:
    """Law of a*X + b for X ~ p.

    Scale becomes |a|*sigma and skewness sign(a)*beta.  For alpha = 1 the
    location picks up the extra -(2/pi)*beta*a*sigma*log|a| term that the
    1-type convention produces under scaling.
    """
    if a == 0.0:
        raise ValueError("affine transform requires a != 0")
    beta = p.beta if a > 0 else -p.beta
    sigma = abs(a) * p.sigma
    mu = a * p.mu + b
    if p.alpha == 1.0:
        mu -= (2.0 / pi) * p.beta * a * p.sigma * log(abs(a))
    return StableParams(p.alpha, beta, sigma, mu)


def convolve(p1: StableParams, p2: StableParams) -> StableParams:
    """Law of X1 + X2 for independent X1 ~ p1, X2 ~ p2 (same alpha, beta)."""
    if p1.alpha != p2.alpha:
        raise ValueError(f"alpha mismatch: {p1.alpha} vs {p2.alpha}")
    if p1.beta != p2.beta:
        raise ValueError(f"beta mismatch: {p1.beta} vs {p2.beta}")
    sigma = (p1.sigma**p1.alpha + p2.sigma**p1.alpha) ** (1.0 / p1.alpha)
    return StableParams(p1.alpha, p1.beta, sigma, p1.mu + p2.mu)


def _standardize(p: StableParams, x: float) -> float:
    """Map x to z such that cdf(p, x) = cdf_std(alpha, beta, z)."""
    if p.alpha == 1.0:
        return (x - p.mu - (2.0 / pi) * p.beta * p.sigma * log(p.sigma)) / p.sigma
    return (x - p.mu) / p.sigma


def _unstandardize(p: StableParams, z: float) -> float:
    if p.alpha == 1.0:
        return p.mu + (2.0 / pi) * p.beta * p.sigma * log(p.sigma) + p.sigma * z
    return p.mu + p.sigma * z


def _inversion_integral(alpha: float, beta: float, z: float, damp_power: float,
                        epsabs: float, trig) -> float:
    """Common engine for the Gil-Pelaez CDF/PDF integrals.

    Computes int_0^inf exp(-u^alpha) * trig(z*u + psi(u)) * u^(-damp_power) du
    where psi is the skewness phase of the standardized characteristic
    function.  trig is np.sin (CDF, damp_power 1) or np.cos (PDF, 0).
    Moderate oscillation goes to plain adaptive quadrature; fast
    oscillation in z*u is delegated to QUADPACK's QAWO weights.
    """
    U = _LOG_TINY ** (1.0 / alpha)
    if alpha != 1.0:
        eta = beta * tan(pi * alpha / 2.0)

        def psi(u):
            return -eta * u**alpha

        psi_cycles = abs(eta) * U**alpha / (2.0 * pi)
    else:

        def psi(u):
            return (2.0 / pi) * beta * u * np.log(u)

        psi_cycles = abs(beta) * U * log(max(U, 2.0)) / pi**2

    def f(u):
        return np.exp(-(u**alpha)) * trig(z * u + psi(u)) * u ** (-damp_power)

    z_cycles = abs(z) * U / (2.0 * pi)
    if z_cycles + psi_cycles <= 60.0:
        # QUADPACK's slow-convergence warning fires on the integrable
        # log/power endpoint singularities; the error estimate below is
        # the authoritative convergence check
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, err = quad(f, 0.0, U, limit=1000, epsabs=epsabs, epsrel=1e-10)
        if err > max(10.0 * epsabs, 1e-7):
            raise QuadratureError(
                f"stable inversion integral error {err:.2e} exceeds tolerance "
                f"(alpha={alpha}, beta={beta}, z={z})"
            )
        return val
    if psi_cycles > 200.0:
        raise QuadratureError(
            f"inversion integrand oscillates too fast in the skew phase "
            f"(alpha={alpha}, beta={beta}): unsupported regime"
        )
    # trig(z*u + psi) = trig(zu)cos(psi) -+ cotrig(zu)sin(psi); QAWO carries
    # the z*u factor, the rest stays slowly varying.
    zz, bb = (z, beta) if z >= 0.0 else (-z, -beta)
    if alpha != 1.0:
        eta_r = bb * tan(pi * alpha / 2.0)

        def psi_r(u):
            return -eta_r * u**alpha
    else:

        def psi_r(u):
            return (2.0 / pi) * bb * u * np.log(u)

    def g_cos(u):
        return np.exp(-(u**alpha)) * np.cos(psi_r(u)) * u ** (-damp_power)

    def g_sin(u):
        return np.exp(-(u**alpha)) * np.sin(psi_r(u)) * u ** (-damp_power)

    delta = min(0.5 * U, 6.0 * pi / zz)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        head, _ = quad(
            lambda u: np.exp(-(u**alpha)) * trig(zz * u + psi_r(u)) * u ** (-damp_power),
            0.0, delta, limit=400, epsabs=epsabs, epsrel=1e-10,
        )
    opts = dict(limit=400, epsabs=epsabs, epsrel=1e-10)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        if trig is np.sin:
            t1, e1 = quad(g_cos, delta, U, weight="sin", wvar=zz, **opts)
            t2, e2 = quad(g_sin, delta, U, weight="cos", wvar=zz, **opts)
            val = head + t1 + t2
        else:
            t1, e1 = quad(g_cos, delta, U, weight="cos", wvar=zz, **opts)
            t2, e2 = quad(g_sin, delta, U, weight="sin", wvar=zz, **opts)
            val = head + t1 - t2
    if e1 + e2 > max(20.0 * epsabs, 1e-7):
        raise QuadratureError(
            f"oscillatory inversion integral error {e1 + e2:.2e} too large "
            f"(alpha={alpha}, beta={beta}, z={z})"
        )
    if trig is np.sin and z < 0.0:
        return -val
    return val


def _cdf_std(alpha: float, beta: float, z: float, quad_tol: float) -> float:
    if alpha >= _GAUSS_ALPHA:
        return float(ndtr(z / sqrt(2.0)))
    if alpha == 1.0 and beta == 0.0:
        return 0.5 + atan(z) / pi
    if alpha < 1.0 and beta == 1.0 and z <= 0.0:
        return 0.0
    if alpha < 1.0 and beta == -1.0 and z >= 0.0:
        return 1.0
    val = 0.5 + _inversion_integral(alpha, beta, z, 1.0, quad_tol, np.sin) / pi
    return min(1.0, max(0.0, val))


def cdf(p: StableParams, x: float, quad_tol: float = DEFAULT_QUAD_TOL) -> float:
    """P(X <= x) for X ~ p, by inversion of the characteristic function."""
    return _cdf_std(p.alpha, p.beta, _standardize(p, x), quad_tol)


def pdf(p: StableParams, x: float, quad_tol: float = DEFAULT_QUAD_TOL) -> float:
    """Density of p at x."""
    z = _standardize(p, x)
    if p.alpha >= _GAUSS_ALPHA:
        return exp(-z * z / 4.0) / (2.0 * sqrt(pi)) / p.sigma
    if p.alpha == 1.0 and p.beta == 0.0:
        return 1.0 / (pi * (1.0 + z * z)) / p.sigma
    lo, hi = StableParams(p.alpha, p.beta, 1.0, 0.0).support_bounds()
    if z < lo or z > hi:
        return 0.0
    val = _inversion_integral(p.alpha, p.beta, z, 0.0, quad_tol, np.cos) / pi
    return max(0.0, val) / p.sigma


def _tail_anchor(alpha: float, beta: float, q: float) -> float:
    """Initial standardized-quantile guess from the Pareto tail asymptote.

    For alpha < 2 and beta > -1 the right tail obeys
    1 - F(z) ~ c_alpha * (1 + beta) * z^(-alpha) with
    c_alpha = Gamma(alpha) * sin(pi*alpha/2) / pi.
    """
    c = _gamma_fn(alpha) * sin(pi * alpha / 2.0) / pi
    tail = 1.0 - q if q >= 0.5 else q
    b = beta if q >= 0.5 else -beta
    if alpha < 2.0 and (1.0 + b) > 1e-12 and tail < 0.1:
        z = (c * (1.0 + b) / tail) ** (1.0 / alpha)
    else:
        z = sqrt(2.0) * abs(ndtri(tail)) + 1.0
    return z if q >= 0.5 else -z


def quantile(
    p: StableParams,
    q: float,
    quantile_tol: float = DEFAULT_QUANTILE_TOL,
    quad_tol: float = DEFAULT_QUAD_TOL,
) -> float:
    """Value x with cdf(p, x) = q, to within quantile_tol in probability.

    Brackets the root starting from the power-law tail asymptote, then
    bisects the bracket down to 1e-10 relative width (the correctness
    backstop) with one final secant refinement.
    """
    if not (0.0 < q < 1.0):
        raise ValueError(f"quantile level must be in (0, 1), got {q}")
    if p.alpha >= _GAUSS_ALPHA:
        return _unstandardize(p, sqrt(2.0) * float(ndtri(q)))
    if p.alpha == 1.0 and p.beta == 0.0:
        return _unstandardize(p, tan(pi * (q - 0.5)))

    def F(z):
        return _cdf_std(p.alpha, p.beta, z, quad_tol)

    lo_sup, hi_sup = StableParams(p.alpha, p.beta, 1.0, 0.0).support_bounds()
    z0 = _tail_anchor(p.alpha, p.beta, q)
    lo, hi = z0 - 1.0, z0 + 1.0
    lo = max(lo, lo_sup)
    hi = min(hi, hi_sup)
    flo, fhi = F(lo), F(hi)
    for _ in range(200):
        if flo < q:
            break
        lo = max(lo - max(1.0, abs(lo)), lo_sup + 1e-300)
        flo = F(lo)
    else:
        raise QuadratureError(f"failed to bracket quantile {q} from below")
    for _ in range(200):
        if fhi > q:
            break
        hi = min(hi + max(1.0, abs(hi)), hi_sup - 1e-300 if hi_sup < np.inf else np.inf)
        fhi = F(hi)
    else:
        raise QuadratureError(f"failed to bracket quantile {q} from above")

    width_target = 1e-10 * max(1.0, abs(lo), abs(hi))
    while hi - lo > width_target:
        mid = 0.5 * (lo + hi)
        fmid = F(mid)
        if fmid < q:
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    z = 0.5 * (lo + hi)
    if fhi > flo:
        z_sec = lo + (q - flo) * (hi - lo) / (fhi - flo)
        if lo <= z_sec <= hi:
            z = z_sec
    if abs(F(z) - q) > quantile_tol:
        raise QuadratureError(
            f"quantile refinement stalled at |cdf - q| > {quantile_tol} "
            f"(alpha={p.alpha}, beta={p.beta}, q={q})"
        )
    return _unstandardize(p, z)


def location_for_standard_quantile(p: StableParams, q_std: float) -> float:
    """Quantile of p given the matching quantile q_std of S(alpha, beta, 1, 0).

    This is the affine map mu + sigma*q_std, with the alpha = 1 scaling
    correction when it applies; it lets sweeps reuse one standardized
    quantile across many (sigma, mu) pairs.
    """
    return _unstandardize(p, q_std)


def sample(p: StableParams, rng: np.random.Generator, size=None):
    """Draw variates from p with the Chambers-Mallows-Stuck method.

    rng is a numpy Generator; independent streams (e.g. from
    ``rng.spawn``) may be consumed concurrently, a single stream must not
    be shared unsynchronized.
    """
    V = rng.uniform(-pi / 2.0, pi / 2.0, size)
    W = rng.exponential(1.0, size)
    a, b = p.alpha, p.beta
    if a != 1.0:
        t = b * tan(pi * a / 2.0)
        B = atan(t) / a
        S = (1.0 + t * t) ** (1.0 / (2.0 * a))
        z = (
            S
            * np.sin(a * (V + B))
            / np.cos(V) ** (1.0 / a)
            * (np.cos(V - a * (V + B)) / W) ** ((1.0 - a) / a)
        )
        return p.sigma * z + p.mu
    bv = pi / 2.0 + b * V
    z = (2.0 / pi) * (bv * np.tan(V) - b * np.log((pi / 2.0) * W * np.cos(V) / bv))
    return p.sigma * z + p.mu + (2.0 / pi) * b * p.sigma * log(p.sigma)
