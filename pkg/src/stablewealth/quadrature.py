"""Romberg integration with Richardson extrapolation.

Used for the smooth [0, 1] integrals that define the continuous-schedule
scale parameters and the lump-sum discount.  Integrands of the form
x^alpha * (smooth) have a weak endpoint singularity in their higher
derivatives when alpha is fractional; an internal cubic substitution
x = y^3 restores fast Richardson convergence without changing the
integral or the [0, 1] contract.
"""

from __future__ import annotations

import numpy as np


class QuadratureError(RuntimeError):
    """Numerical integration or root bracketing failed to converge."""


def romberg(
    f,
    a: float,
    b: float,
    tol: float = 1e-12,
    max_depth: int = 20,
    min_depth: int = 4,
) -> float:
    """Integrate a vectorized callable ``f`` over [a, b].

    Builds the trapezoid ladder with interval halving and accelerates it
    with Richardson extrapolation.  Convergence is declared when two
    successive diagonal entries agree to ``tol`` (absolute, relative to
    the magnitude of the estimate); otherwise raises QuadratureError
    rather than returning a silently inaccurate value.
    """
    if not b > a:
        raise ValueError(f"integration interval must satisfy b > a, got [{a}, {b}]")
    r = np.zeros((max_depth, max_depth))
    h = b - a
    fa, fb = float(f(np.array([a]))[0]), float(f(np.array([b]))[0])
    r[0, 0] = 0.5 * h * (fa + fb)
    n = 1
    for i in range(1, max_depth):
        n *= 2
        h *= 0.5
        xs = a + (2.0 * np.arange(1, n // 2 + 1) - 1.0) * h
        r[i, 0] = 0.5 * r[i - 1, 0] + h * float(np.sum(f(xs)))
        for j in range(1, i + 1):
            r[i, j] = r[i, j - 1] + (r[i, j - 1] - r[i - 1, j - 1]) / (4.0**j - 1.0)
        if i >= min_depth:
            scale = max(1.0, abs(r[i, i]))
            if abs(r[i, i] - r[i - 1, i - 1]) < tol * scale:
                return float(r[i, i])
    raise QuadratureError(
        f"Romberg integration did not reach tol={tol} within depth {max_depth}"
    )


def romberg_unit(f, tol: float = 1e-12, max_depth: int = 20) -> float:
    """Integrate ``f`` over [0, 1] after the smoothing substitution x = y^3.

    The substitution maps a weak x^alpha endpoint singularity at 0 to
    y^(3*alpha + 2), which the Richardson ladder resolves at full rate for
    every shape parameter used here.
    """

    def g(y):
        return 3.0 * y * y * f(y**3)

    return romberg(g, 0.0, 1.0, tol=tol, max_depth=max_depth)
