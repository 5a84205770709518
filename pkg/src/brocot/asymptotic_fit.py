"""Least-squares machinery for matching measured moment-sum series to
their asymptotic expansion shapes.

Everything here is deterministic: the normal equations are solved by a
hand-rolled Gaussian elimination with per-column RMS scaling, so results
do not depend on a linear-algebra backend.  Log factors are never
fitted; they surface as small shifts of the measured decay exponents and
are absorbed by the tolerance bands of the callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .brocot_sums import SeriesSample

__all__ = [
    "ExpansionModel",
    "RankDeficientError",
    "SlopeConverged",
    "SlopeEstimate",
    "error_slope",
    "extrapolate_limit",
    "fit_expansion",
]


class RankDeficientError(ValueError):
    """The fit basis is numerically collinear over the sample window."""


class SlopeConverged(ValueError):
    """All residuals vanish to double precision; no slope to measure."""


@dataclass(frozen=True)
class ExpansionModel:
    """Fitted truncation of value(n) ~ sum_j c_j * n^(-e_j)."""

    exponents: tuple[float, ...]
    coefficients: tuple[float, ...]
    residual_rms: float
    fit_window: tuple[int, int]

    def predict(self, n: float) -> float:
        return math.fsum(c * n**-e for c, e in zip(self.coefficients, self.exponents))


@dataclass(frozen=True)
class SlopeEstimate:
    slope: float
    intercept: float
    r_squared: float


def _solve(matrix: list[list[float]], rhs: list[float]) -> list[float]:
    """Gaussian elimination with partial pivoting on a small SPD-ish system."""
    size = len(rhs)
    aug = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(size):
        pivot_row = max(range(col, size), key=lambda r: abs(aug[r][col]))
        if abs(aug[pivot_row][col]) < 1e-12:
            raise RankDeficientError(
                "fit basis is rank deficient over this window "
                "(exponents too close together)"
            )
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        inv = 1.0 / aug[col][col]
        for row in range(size):
            if row == col:
                continue
            factor = aug[row][col] * inv
            if factor:
                for j in range(col, size + 1):
                    aug[row][j] -= factor * aug[col][j]
    return [aug[i][size] / aug[i][i] for i in range(size)]


def _sample_points(samples: Sequence[SeriesSample]) -> tuple[list[int], list[float]]:
    if len({(s.beta, s.kind) for s in samples}) > 1:
        raise ValueError("samples must share beta and kind")
    ordered = sorted(samples, key=lambda s: s.n)
    return [s.n for s in ordered], [float(s.value) for s in ordered]


def _weighted_lsq(
    ns: Sequence[int],
    ys: Sequence[float],
    exps: Sequence[float],
    weights: Sequence[float],
) -> list[float]:
    """Normal-equations solve of ys ~ sum_j c_j n^(-e_j) with per-column
    RMS scaling (columns normalized to unit weighted RMS)."""
    columns = [[float(n) ** -e for n in ns] for e in exps]
    scales = [
        math.sqrt(sum(w * c * c for w, c in zip(weights, col)) / len(ns)) for col in columns
    ]
    if min(scales) <= 0.0:
        raise RankDeficientError("degenerate basis column")
    scaled = [[c / s for c in col] for col, s in zip(columns, scales)]
    size = len(exps)
    gram = [
        [sum(w * scaled[i][p] * scaled[j][p] for p, w in enumerate(weights)) for j in range(size)]
        for i in range(size)
    ]
    moment = [sum(w * scaled[i][p] * ys[p] for p, w in enumerate(weights)) for i in range(size)]
    solution = _solve(gram, moment)
    return [c / s for c, s in zip(solution, scales)]


def fit_expansion(
    samples: Sequence[SeriesSample],
    exponents: Sequence[float],
    weight_power: float = 0.0,
) -> ExpansionModel:
    """Least squares of sample values against the basis n^(-e_j).

    Solved through the normal equations after per-column RMS scaling.
    weight_power w weights each sample by n^w (w > 0 localizes the fit
    toward the deep end of the window, where the truncated model is
    closest to the data); the default 0 is a plain fit.
    """
    exps = [float(e) for e in exponents]
    if sorted(exps) != exps or len(set(exps)) != len(exps):
        raise ValueError(f"exponents must be strictly increasing, got {exponents}")
    if len(samples) < len(exps) + 2:
        raise ValueError(
            f"need at least {len(exps) + 2} samples for {len(exps)} exponents, "
            f"got {len(samples)}"
        )
    ns, ys = _sample_points(samples)
    weights = [float(n) ** weight_power for n in ns]
    coeffs = _weighted_lsq(ns, ys, exps, weights)

    residuals = [
        y - math.fsum(c * float(n) ** -e for c, e in zip(coeffs, exps))
        for n, y in zip(ns, ys)
    ]
    rms = math.sqrt(sum(r * r for r in residuals) / len(ns))
    return ExpansionModel(tuple(exps), tuple(coeffs), rms, (ns[0], ns[-1]))


def extrapolate_limit(samples: Sequence[SeriesSample], leading_exponent: float) -> float:
    """Estimated limit of n^leading_exponent * value as n grows.

    Fits the rescaled values against [1, 1/n, 1/n^2] on the deepest half
    of the samples (at least 5 points): the shallow end of a window is
    the part worst described by a three-term truncation, and dropping it
    is what makes the constant term an asymptotic estimate rather than a
    mid-window compromise.
    """
    if len(samples) < 5:
        raise ValueError(f"need at least 5 samples, got {len(samples)}")
    ns, ys = _sample_points(samples)
    keep = max(5, (len(ns) + 1) // 2)
    ns, ys = ns[-keep:], ys[-keep:]
    scaled = [y * float(n) ** leading_exponent for n, y in zip(ns, ys)]
    return _weighted_lsq(ns, scaled, [0.0, 1.0, 2.0], [1.0] * len(ns))[0]


def error_slope(
    samples: Sequence[SeriesSample],
    predicted_limit: float,
    leading_exponent: float,
) -> SlopeEstimate:
    """OLS slope of log|n^e * value - predicted_limit| against log n."""
    if len(samples) < 4:
        raise ValueError(f"need at least 4 samples, got {len(samples)}")
    ns, ys = _sample_points(samples)
    residuals = [abs(y * float(n) ** leading_exponent - predicted_limit) for n, y in zip(ns, ys)]
    if all(r < 1e-15 for r in residuals):
        raise SlopeConverged("residuals are zero to double precision")
    xs = [math.log(n) for n in ns]
    ls = [math.log(r) for r in residuals]
    mean_x = sum(xs) / len(xs)
    mean_l = sum(ls) / len(ls)
    sxx = sum((x - mean_x) ** 2 for x in xs)
    sxl = sum((x - mean_x) * (l - mean_l) for x, l in zip(xs, ls))
    slope = sxl / sxx
    intercept = mean_l - slope * mean_x
    ss_res = sum((l - slope * x - intercept) ** 2 for x, l in zip(xs, ls))
    ss_tot = sum((l - mean_l) ** 2 for l in ls)
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return SlopeEstimate(slope, intercept, r_squared)
