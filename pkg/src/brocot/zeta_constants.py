"""Riemann zeta for real argument and the closed-form constants the
moment-sum asymptotics predict, with independent Dirichlet-series and
enumeration oracles.

The constant governing every main term is the ratio
rho = zeta(2*beta-1)/zeta(2*beta): the interval moment sum scales like
2*rho/n^beta, and the order moment sum like C0/n^(2*beta).  Two
candidate values of C0 are provided and deliberately kept apart:

* flank_limit_formula: rho + 2*rho^2, the closed form the dominant-part
  analysis arrives at when the sum over canonical expansions is equated
  with rho itself, and
* the enumerated flank limit (flank_moment_limit), the directly summed
  w -> infinity limit of the flank moment sum.  The Dirichlet identity
  sum phi(q)/q^s = zeta(s-1)/zeta(s) makes the canonical-expansion sum
  rho - 1, not rho, so the enumerated limit comes out at 2*rho^2.

Which candidate is right is adjudicated by the measured order-sum data
(see the report command); this module reports both and prefers neither.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .brocot_sums import BetaRangeError, MomentQuery, sigma_q
from .stern_brocot import GuardError

__all__ = [
    "FLANK_LIMIT_GUARD",
    "FlankLimit",
    "TotientSum",
    "ZetaConstants",
    "constants_for",
    "flank_moment_limit",
    "totient_sum_oracle",
    "zeta",
]

FLANK_LIMIT_GUARD = 30
TOTIENT_GUARD = 10**8
DEFAULT_FLANK_TRUNCATION = 20

# B_2, B_4, ..., B_30; enough correction orders for 1e-14 targets.
_BERNOULLI = [
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
    Fraction(-174611, 330),
    Fraction(854513, 138),
    Fraction(-236364091, 2730),
    Fraction(8553103, 6),
    Fraction(-23749461029, 870),
    Fraction(8615841276005, 14322),
]


def _euler_maclaurin_correction(s: float, cutoff: int, order: int) -> tuple[float, float]:
    """Bernoulli correction terms and the magnitude of the first omitted
    one (a valid remainder bound for real s > 0)."""
    total = 0.0
    rising = s  # s (s+1) ... (s + 2j - 2)
    power = float(cutoff) ** (-s - 1)
    term = 0.0
    for j in range(1, order + 2):
        coeff = float(_BERNOULLI[j - 1]) / math.factorial(2 * j)
        term = coeff * rising * power
        if j <= order:
            total += term
        rising *= (s + 2 * j - 1) * (s + 2 * j)
        power /= float(cutoff) ** 2
    return total, abs(term)


def zeta(s: float, target_error: float = 1e-13) -> float:
    """Riemann zeta for real s > 1 by Euler-Maclaurin summation.

    The cutoff is grown until the explicit remainder bound (the first
    omitted Bernoulli term) drops below target_error.
    """
    if s <= 1 + 1e-6:
        raise ValueError(f"s must exceed 1 + 1e-6, got {s}")
    if target_error < 1e-14:
        raise ValueError(f"target_error below 1e-14 is not reachable in doubles, got {target_error}")
    order = 10
    cutoff = 8
    while True:
        correction, remainder = _euler_maclaurin_correction(s, cutoff, order)
        if remainder <= target_error / 2:
            break
        cutoff *= 2
        if cutoff > 1 << 22:
            raise ValueError(f"tolerance {target_error} unreachable for s={s}")
    head = math.fsum(k ** (-s) for k in range(1, cutoff))
    return head + 0.5 * cutoff ** (-s) + cutoff ** (1 - s) / (s - 1) + correction


class TotientSum(NamedTuple):
    """Partial Dirichlet series sum_{q=2}^{q_max} phi(q)/q^(2 beta) with
    an integral bound on the omitted tail."""

    value: float
    tail_bound: float


def totient_sum_oracle(beta: float, q_max: int) -> TotientSum:
    """Independent check of the zeta ratio: the full series over q >= 2
    equals zeta(2*beta-1)/zeta(2*beta) - 1."""
    if q_max < 2:
        raise ValueError(f"q_max must be >= 2, got {q_max}")
    if q_max > TOTIENT_GUARD:
        raise GuardError(f"totient sieve guarded at q_max <= {TOTIENT_GUARD}")
    if beta <= 1:
        raise BetaRangeError(f"totient sum oracle requires beta > 1, got {beta}")
    phi = np.arange(q_max + 1, dtype=np.int64)
    for p in range(2, q_max + 1):
        if phi[p] == p:  # p prime
            phi[p::p] -= phi[p::p] // p
    qs = np.arange(2, q_max + 1, dtype=np.float64)
    value = float(np.sum(phi[2:].astype(np.float64) * qs ** (-2.0 * beta)))
    tail = q_max ** (2 - 2 * beta) / (2 * beta - 2)
    return TotientSum(value, tail)


class FlankLimit(NamedTuple):
    """Truncated enumeration limit of the flank moment sum with a crude
    power-law tail estimate."""

    value: float
    tail_estimate: float


def flank_moment_limit(
    beta: float,
    v_max: int = DEFAULT_FLANK_TRUNCATION,
    workers: int | None = None,
    order_sums: Sequence[float] | None = None,
) -> FlankLimit:
    """Sum of (K(P) K(S))^(-2*beta) over prefix/suffix pairs with part
    sums totalling at most v_max (P any composition including empty, S
    empty or canonical).

    This is the w -> infinity limit of flank_moment_sum.  The pair sum
    factorizes through per-sum tables: the canonical side of sum v is
    the order moment sum sigma_Q(v), and the unconstrained side equals
    2*sigma_Q(v) for v >= 2 because appending/removing a trailing 1
    pairs the two families without changing the continuant.  order_sums
    may supply precomputed sigma_Q values (index = v) to skip the
    traversals.
    """
    if beta <= 1:
        raise BetaRangeError(f"flank moment limit requires beta > 1, got {beta}")
    if not 0 <= v_max <= FLANK_LIMIT_GUARD:
        raise GuardError(f"v_max must lie in [0, {FLANK_LIMIT_GUARD}], got {v_max}")
    canonical = [1.0, 0.0]
    for v in range(2, v_max + 1):
        if order_sums is not None and v < len(order_sums) and order_sums[v] is not None:
            canonical.append(float(order_sums[v]))
        else:
            canonical.append(float(sigma_q(MomentQuery(beta, v), workers=workers).value))
    unconstrained = [1.0, 1.0] + [2.0 * s for s in canonical[2:]]

    layer = [0.0] * (v_max + 1)
    for total in range(v_max + 1):
        layer[total] = math.fsum(
            unconstrained[u] * canonical[total - u] for u in range(total + 1)
        )
    value = math.fsum(layer)
    decay = 2 * beta - 1
    tail = layer[v_max] * v_max / (decay - 1.0) if v_max >= 1 else math.inf
    return FlankLimit(value, tail)


@dataclass(frozen=True)
class ZetaConstants:
    """Closed-form constants for one exponent beta.

    ratio is zeta(2b-1)/zeta(2b); main_interval_coeff = 2*ratio is the
    leading coefficient of n^beta * sigma_F(n).  flank_limit_formula and
    flank_limit_enumerated are the two C0 candidates described in the
    module docstring (the enumerated one carries its truncation).
    """

    beta: float
    zeta_hi: float
    zeta_lo: float
    ratio: float
    main_interval_coeff: float
    flank_limit_formula: float
    flank_limit_enumerated: FlankLimit


def constants_for(
    beta: float,
    flank_truncation: int = DEFAULT_FLANK_TRUNCATION,
    workers: int | None = None,
    order_sums: Sequence[float] | None = None,
) -> ZetaConstants:
    if beta <= 1:
        raise BetaRangeError(f"constants require beta > 1, got {beta}")
    hi = zeta(2 * beta - 1)
    lo = zeta(2 * beta)
    ratio = hi / lo
    return ZetaConstants(
        beta=beta,
        zeta_hi=hi,
        zeta_lo=lo,
        ratio=ratio,
        main_interval_coeff=2 * ratio,
        flank_limit_formula=ratio + 2 * ratio**2,
        flank_limit_enumerated=flank_moment_limit(
            beta, flank_truncation, workers=workers, order_sums=order_sums
        ),
    )
