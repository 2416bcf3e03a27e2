"""Annual index data ingestion, return computation, and stable fitting.

Input files are CSV with header ``year,I,D,C``: I is the average monthly
close of the index for the year, D the dividend per share, and C the
January consumer price index.  The inflation-adjusted gross total return
for year n is

    (I_{n+1} + D_n) / I_n * C_n / C_{n+1},

dividends reinvested, deflated by the CPI ratio.  Annual log-returns are
assumed independent; fitting uses the iterative Koutrouvelis regression
on the empirical characteristic function (Koutrouvelis 1980, 1981).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from math import exp, pi, tan
from pathlib import Path

import numpy as np

from .stable import StableParams, quantile

FIT_TOL = 1e-4
FIT_MAX_ITER = 20
MIN_FIT_OBS = 30


class DataError(Exception):
    """Base class for ingestion failures."""


class SchemaError(DataError):
    """Header or row layout does not match ``year,I,D,C``."""


class ValidationError(DataError):
    """Parsed values violate the series invariants."""


@dataclass(frozen=True)
class RawSeries:
    """Validated annual observations: strictly consecutive years, positive values."""

    years: np.ndarray
    index_level: np.ndarray
    dividend: np.ndarray
    cpi: np.ndarray

    def __len__(self) -> int:
        return self.years.size


@dataclass(frozen=True)
class ReturnSeries:
    """Inflation-adjusted annual total returns; one fewer row than the raw series."""

    years: np.ndarray
    gross: np.ndarray
    log_returns: np.ndarray

    def __len__(self) -> int:
        return self.years.size


@dataclass(frozen=True)
class FitResult:
    params: StableParams
    method: str
    converged: bool
    iterations: int
    # (plotting position, empirical quantile, model quantile) triples
    diagnostics: tuple[tuple[float, float, float], ...] = ()


def load_csv(path) -> RawSeries:
    """Parse and validate an annual ``year,I,D,C`` file.

    Raises SchemaError for a bad header or malformed row, ValidationError
    for year gaps or nonpositive values; both name the offending row.
    I/O problems propagate as OSError.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header year,I,D,C")
        if [h.strip() for h in header] != ["year", "I", "D", "C"]:
            raise SchemaError(f"{path}: header must be year,I,D,C, got {header}")
        years, level, div, cpi = [], [], [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 4:
                raise SchemaError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            try:
                y = int(row[0])
                vals = [float(cell) for cell in row[1:]]
            except ValueError as err:
                raise SchemaError(f"{path}:{lineno}: unparseable value ({err})")
            for name, v in zip("IDC", vals):
                if not v > 0.0:
                    raise ValidationError(f"{path}:{lineno}: column {name} must be positive, got {v}")
            years.append(y)
            level.append(vals[0])
            div.append(vals[1])
            cpi.append(vals[2])
    if len(years) < 2:
        raise ValidationError(f"{path}: need at least two rows to form a return")
    ya = np.array(years)
    gaps = np.flatnonzero(np.diff(ya) != 1)
    if gaps.size:
        i = gaps[0]
        raise ValidationError(
            f"{path}: years must be consecutive; {ya[i]} is followed by {ya[i + 1]} (row {i + 3})"
        )
    return RawSeries(ya, np.array(level), np.array(div), np.array(cpi))


def to_returns(raw: RawSeries) -> ReturnSeries:
    """Inflation-adjusted gross and log total returns, year n labelled by n."""
    if len(raw) < 2:
        raise ValidationError("need at least two rows to form a return")
    gross = (
        (raw.index_level[1:] + raw.dividend[:-1])
        / raw.index_level[:-1]
        * raw.cpi[:-1]
        / raw.cpi[1:]
    )
    return ReturnSeries(raw.years[:-1], gross, np.log(gross))


# Koutrouvelis (1980) regression-point tables, rows by shape estimate,
# columns by sample size n in {200, 800, 1600}.
_TBL_ALPHAS = np.array([1.9, 1.5, 1.3, 1.1, 0.9, 0.7, 0.5, 0.3])
_TBL_N = np.array([200.0, 800.0, 1600.0])
_TBL_K = np.array(
    [
        [9, 9, 9],
        [11, 11, 11],
        [22, 16, 14],
        [24, 18, 15],
        [28, 22, 18],
        [30, 24, 20],
        [86, 68, 56],
        [134, 124, 118],
    ],
    dtype=float,
)
_TBL_L = np.array(
    [
        [9, 10, 11],
        [12, 14, 15],
        [16, 18, 17],
        [14, 14, 14],
        [24, 16, 16],
        [40, 38, 36],
        [70, 68, 66],
        [86, 88, 89],
    ],
    dtype=float,
)


def _points_lookup(table: np.ndarray, alpha: float, n: int) -> int:
    a = float(np.clip(alpha, _TBL_ALPHAS[-1], _TBL_ALPHAS[0]))
    nn = float(np.clip(n, _TBL_N[0], _TBL_N[-1]))
    ai = np.interp(-a, -_TBL_ALPHAS, np.arange(_TBL_ALPHAS.size))
    ni = np.interp(nn, _TBL_N, np.arange(_TBL_N.size))
    i0, i1 = int(np.floor(ai)), int(np.ceil(ai))
    j0, j1 = int(np.floor(ni)), int(np.ceil(ni))
    fa, fn = ai - i0, ni - j0
    v = (
        (1 - fa) * (1 - fn) * table[i0, j0]
        + (1 - fa) * fn * table[i0, j1]
        + fa * (1 - fn) * table[i1, j0]
        + fa * fn * table[i1, j1]
    )
    return max(2, int(round(v)))


def fit_stable(
    returns: ReturnSeries,
    init: StableParams,
    tol: float = FIT_TOL,
    max_iter: int = FIT_MAX_ITER,
    diagnostic_points: int = 160,
) -> FitResult:
    """Iterative Koutrouvelis regression fit of the log-returns.

    Each pass standardizes by the current location/scale, regresses
    log(-log |ecf|^2) on log t for the shape and scale, then regresses the
    unwrapped ecf phase on (u, sign(u)|u|^alpha) for the location and
    skewness.  Iterates until every parameter moves less than tol, or
    max_iter passes; a non-converged result is returned with
    ``converged=False`` rather than silently treated as converged.
    Samples smaller than 30 observations carry large estimator variance.
    """
    x = np.asarray(returns.log_returns, dtype=float)
    n = x.size
    if n < MIN_FIT_OBS:
        raise ValidationError(
            f"need at least {MIN_FIT_OBS} observations to fit, got {n}"
        )
    alpha, beta, sigma, mu = init.alpha, init.beta, init.sigma, init.mu
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        prev = (alpha, beta, sigma, mu)
        z = (x - mu) / sigma
        kpts = _points_lookup(_TBL_K, alpha, n)
        t = pi * np.arange(1, kpts + 1) / 25.0
        ecf = np.exp(1j * np.outer(t, z)).mean(axis=1)
        y = np.log(-np.log(np.abs(ecf) ** 2))
        design = np.column_stack([np.ones_like(t), np.log(t)])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        alpha = float(np.clip(coef[1], 0.35, 2.0))
        scale_z = (exp(coef[0]) / 2.0) ** (1.0 / alpha)
        sigma = sigma * scale_z

        z = (x - mu) / sigma
        lpts = _points_lookup(_TBL_L, alpha, n)
        u = pi * np.arange(1, lpts + 1) / 50.0
        ecf2 = np.exp(1j * np.outer(u, z)).mean(axis=1)
        phase = np.unwrap(np.angle(ecf2))
        # tan(pi*alpha/2) is singular at alpha = 1; regress just off it
        alpha_reg = alpha if abs(alpha - 1.0) > 1e-2 else 1.0 + np.copysign(1e-2, alpha - 1.0)
        design2 = np.column_stack([u, np.sign(u) * np.abs(u) ** alpha_reg])
        coef2, *_ = np.linalg.lstsq(design2, phase, rcond=None)
        beta = float(np.clip(coef2[1] / tan(pi * alpha_reg / 2.0), -1.0, 1.0))
        mu = mu + sigma * float(coef2[0])

        moves = (
            abs(alpha - prev[0]),
            abs(beta - prev[1]),
            abs(sigma - prev[2]),
            abs(mu - prev[3]),
        )
        if max(moves) < tol:
            converged = True
            break
    params = StableParams(alpha, beta, sigma, mu)
    return FitResult(
        params=params,
        method="koutrouvelis",
        converged=converged,
        iterations=iterations,
        diagnostics=qq_points(returns, params, max_points=diagnostic_points),
    )


def qq_points(
    returns: ReturnSeries, params: StableParams, max_points: int | None = None
) -> tuple[tuple[float, float, float], ...]:
    """Quantile-quantile pairs of the log-returns against a fitted law.

    Plotting positions are (i - 0.5) / n; each order statistic is paired
    with the model quantile at its position.  Each model quantile costs a
    numerical inversion, so max_points caps large samples by evenly
    subsampling the order statistics (positions keep their original i).
    """
    xs = np.sort(np.asarray(returns.log_returns, dtype=float))
    n = xs.size
    if max_points is not None and n > max_points:
        idx = np.unique(np.linspace(0, n - 1, max_points).round().astype(int))
    else:
        idx = np.arange(n)
    out = []
    for i in idx:
        p = (i + 0.5) / n
        out.append((p, float(xs[i]), quantile(params, p)))
    return tuple(out)
