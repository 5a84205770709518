"""Exact arithmetic on continuants and finite continued fractions.

A composition is a tuple of positive integer partial quotients
(a_1, ..., a_t).  Its continuant K(a_1..a_t) is the denominator of the
continued fraction [0; a_1, ..., a_t] and satisfies

    K(a_1..a_t) = a_t * K(a_1..a_{t-1}) + K(a_1..a_{t-2}),

with K() = 1 for the empty composition and K of "length -1" equal to 0
(the latter exists only inside the recurrence, never as a public value).
A composition is canonical when it is empty or its last part is >= 2;
canonical compositions are in bijection with the reduced fractions of
(0, 1).
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Sequence

__all__ = [
    "DEPTH_FACTOR",
    "NeighborTriple",
    "SplitIdentity",
    "cf_value",
    "continuant",
    "is_canonical",
    "max_depth_bound",
    "neighbor_denominators",
    "reversed_cf_value",
    "split_identity_check",
]

# 1/log(golden ratio); any composition with continuant below n^r has at
# most DEPTH_FACTOR * r * log(n) parts.
DEPTH_FACTOR = 1.0 / math.log((1.0 + math.sqrt(5.0)) / 2.0)


class NeighborTriple(NamedTuple):
    """Denominator q of a fraction new at level n and the denominators
    q_minus <= q_plus of its two neighbors in that level."""

    q: int
    q_minus: int
    q_plus: int


class SplitIdentity(NamedTuple):
    """Both sides of the continuant splitting identity at one index."""

    lhs: Fraction
    rhs: Fraction
    equal: bool


def _check_parts(parts: Sequence[int]) -> None:
    for p in parts:
        if not isinstance(p, int) or p < 1:
            raise ValueError(f"partial quotients must be positive integers, got {p!r}")


def is_canonical(parts: Sequence[int]) -> bool:
    """True when the composition is empty or its last part is >= 2."""
    _check_parts(parts)
    return len(parts) == 0 or parts[-1] >= 2


def continuant(parts: Sequence[int]) -> int:
    """Evaluate K(a_1..a_t) exactly; K of the empty composition is 1."""
    _check_parts(parts)
    prev, cur = 0, 1
    for p in parts:
        prev, cur = cur, p * cur + prev
    return cur


def cf_value(parts: Sequence[int]) -> Fraction:
    """Exact value of [0; a_1, ..., a_t]; the empty composition maps to 0.

    Numerator and denominator are the continuants K(a_2..a_t) and
    K(a_1..a_t), which are coprime, so the result is already reduced.
    """
    _check_parts(parts)
    if len(parts) == 0:
        return Fraction(0, 1)
    return Fraction(continuant(parts[1:]), continuant(parts))


def reversed_cf_value(parts: Sequence[int]) -> Fraction:
    """Exact value of the continued fraction read right to left."""
    _check_parts(parts)
    return cf_value(tuple(reversed(parts)))


def split_identity_check(parts: Sequence[int], i: int) -> SplitIdentity:
    """Verify the splitting of a continuant around the i-th quotient (1-based).

    K(a_1..a_t) factors as

        a_i * K(a_1..a_{i-1}) * K(a_{i+1}..a_t)
            * (1 + (1/a_i)[a_{i-1}..a_1] + (1/a_i)[a_{i+1}..a_t]),

    evaluated here in exact rational arithmetic.
    """
    t = len(parts)
    if t < 1:
        raise ValueError("composition must be nonempty")
    if not 1 <= i <= t:
        raise IndexError(f"index {i} out of range 1..{t}")
    _check_parts(parts)
    parts = tuple(parts)
    prefix, a_i, suffix = parts[: i - 1], parts[i - 1], parts[i:]
    lhs = Fraction(continuant(parts))
    rhs = (
        a_i
        * continuant(prefix)
        * continuant(suffix)
        * (1 + (reversed_cf_value(prefix) + cf_value(suffix)) / a_i)
    )
    return SplitIdentity(lhs, rhs, lhs == rhs)


def neighbor_denominators(parts: Sequence[int]) -> NeighborTriple:
    """Neighbor denominators of the fraction with canonical expansion `parts`.

    A fraction first appearing at level n (where n is the sum of the
    parts) has two neighbors there, with denominators
    q_minus = K(a_1..a_{t-1}) and q_plus = K(a_1..a_t - 1) (last part
    decremented).  They satisfy q = q_minus + q_plus and
    q_minus <= q_plus <= a_t * q_minus.
    """
    if len(parts) < 1 or not is_canonical(parts):
        raise ValueError(
            "expected a nonempty canonical composition (last part >= 2), "
            f"got {tuple(parts)!r}"
        )
    parts = tuple(parts)
    q = continuant(parts)
    q_minus = continuant(parts[:-1])
    q_plus = continuant(parts[:-1] + (parts[-1] - 1,))
    return NeighborTriple(q, q_minus, q_plus)


def max_depth_bound(n: int, r: float) -> float:
    """Upper bound DEPTH_FACTOR * r * ln(n) on the length of any
    composition of n whose continuant stays below n^r."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    return DEPTH_FACTOR * r * math.log(n)
