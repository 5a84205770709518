"""Moment sums over the Stern-Brocot partition and their decompositions.

Two families of sums are computed for a fixed exponent beta:

* the interval moment sum sigma_F(n): the sum of the beta-th powers of
  the 2^(n-1) gap lengths of level n, and
* the order moment sum sigma_Q(n): the sum of q^(-2*beta) over the
  denominators q of the fractions first appearing at level n
  (equivalently over the continuants of the canonical compositions of n).

Both have a fast deterministic float path built on the gap-tree
traversal and an exact rational path.  The module also classifies the
compositions of n by continuant size and dominant-part structure,
evaluates the truncated series for the asymptotic correction
coefficients, and provides small brute-force oracles used to cross-check
everything.
"""

from __future__ import annotations

import functools
import math
import operator
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterator, Literal, Sequence

import numpy as np

from .continuants import (
    DEPTH_FACTOR,
    continuant,
    neighbor_denominators,
)
from .stern_brocot import (
    GapFrame,
    GuardError,
    parallel_subtree_sums,
    traverse_reduce,
)

__all__ = [
    "BetaRangeError",
    "BoundCheck",
    "BoundsReport",
    "COEFFICIENT_KINDS",
    "DecompositionCheck",
    "ENUM_GUARD",
    "MomentQuery",
    "PartitionParams",
    "PartitionReport",
    "SeriesSample",
    "TruncatedCoefficient",
    "adjacent_gap_sum",
    "all_compositions",
    "binomial_series_coeff",
    "big_part_decomposition_check",
    "bounds_report",
    "canonical_compositions",
    "default_params",
    "default_r",
    "default_w",
    "flank_moment_sum",
    "partition_sums",
    "sigma_f",
    "sigma_q",
    "truncated_coefficient",
]

ENUM_GUARD = 26          # canonical_compositions: 2^(n-2) tuples
ADJACENT_SUM_GUARD = 22  # enumeration path of adjacent_gap_sum
DECOMPOSITION_GUARD = 20
FLANK_GUARD = 24
BOUNDS_GUARD = 22
COEFF_GUARD = 26

Mode = Literal["exact", "fast-float"]
Scheme = Literal["continuant", "interval"]


class BetaRangeError(ValueError):
    """The exponent lies outside the range the asymptotics require."""


# ---------------------------------------------------------------------------
# queries and samples


@dataclass(frozen=True)
class MomentQuery:
    """One (beta, n) moment-sum request.

    Exact mode needs the involved power to be an integer: integer beta
    for the interval sum, integer 2*beta for the order sum.  beta = 1 is
    admitted for the moment sums themselves (the interval sum then
    telescopes to 1); the asymptotic machinery requires beta > 1.
    """

    beta: float
    n: int
    mode: Mode = "fast-float"

    def __post_init__(self) -> None:
        if self.beta < 1:
            raise BetaRangeError(f"beta must be >= 1, got {self.beta}")
        if self.mode not in ("exact", "fast-float"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")


@dataclass(frozen=True)
class SeriesSample:
    """One measured point of a moment-sum series."""

    n: int
    beta: float
    value: Fraction | float
    kind: Literal["sigma_F", "sigma_Q"]
    mode: Mode


# ---------------------------------------------------------------------------
# composition enumeration (brute-force oracles)


def canonical_compositions(n: int, override_guard: bool = False) -> Iterator[tuple[int, ...]]:
    """All compositions of n whose last part is >= 2 (exactly 2^(n-2)),
    in lexicographic order."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if n > ENUM_GUARD and not override_guard:
        raise GuardError(f"enumeration of 2^{n - 2} compositions refused; guard is {ENUM_GUARD}")

    def rec(remaining: int, prefix: list[int]) -> Iterator[tuple[int, ...]]:
        for part in range(1, remaining + 1):
            if part == remaining:
                if part >= 2:
                    yield tuple(prefix) + (part,)
            else:
                prefix.append(part)
                yield from rec(remaining - part, prefix)
                prefix.pop()

    yield from rec(n, [])


def all_compositions(n: int) -> Iterator[tuple[int, ...]]:
    """All compositions of n into positive parts; n = 0 yields ()."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        yield ()
        return
    stack = [((), n)]
    while stack:
        prefix, remaining = stack.pop()
        for part in range(remaining, 0, -1):
            if part == remaining:
                yield prefix + (part,)
            else:
                stack.append((prefix + (part,), remaining - part))


# ---------------------------------------------------------------------------
# moment sums


def _gap_power_leaf(qa: np.ndarray, qb: np.ndarray, beta: float) -> np.ndarray:
    return (qa * qb).astype(np.float64) ** (-beta)


def _mediant_power_leaf(qa: np.ndarray, qb: np.ndarray, two_beta: float) -> np.ndarray:
    return (qa + qb).astype(np.float64) ** (-two_beta)


def _gap_power_frame(frame: GapFrame, beta: int) -> Fraction:
    return Fraction(1, (frame.q_left * frame.q_right) ** beta)


def _mediant_power_frame(frame: GapFrame, two_beta: int) -> Fraction:
    return Fraction(1, (frame.q_left + frame.q_right) ** two_beta)


def _as_exact_exponent(x: float, what: str) -> int:
    if x != int(x):
        raise ValueError(f"exact mode requires an integer {what}, got {x}")
    return int(x)


def sigma_f(
    query: MomentQuery,
    workers: int | None = None,
    split_depth: int | None = None,
) -> SeriesSample:
    """Interval moment sum: sum of gap-length^beta over level n.

    Exact mode returns the exact rational (integer beta only); fast
    mode returns the deterministic compensated float.
    """
    beta, n = query.beta, query.n
    if query.mode == "exact":
        b = _as_exact_exponent(beta, "beta")
        kernel = functools.partial(_gap_power_frame, beta=b)
        depth = split_depth if split_depth is not None else min(n - 1, 6)
        value: Fraction | float = traverse_reduce(n, depth, kernel, operator.add, workers=workers)
    else:
        value = parallel_subtree_sums(
            n,
            functools.partial(_gap_power_leaf, beta=float(beta)),
            workers=workers,
            split_depth=split_depth,
        )
    return SeriesSample(n, beta, value, "sigma_F", query.mode)


def sigma_q(
    query: MomentQuery,
    workers: int | None = None,
    split_depth: int | None = None,
) -> SeriesSample:
    """Order moment sum: sum of q^(-2*beta) over fractions new at level n.

    The denominators of the new fractions are exactly the mediant
    denominators q_left + q_right over the gaps of level n-1, which is
    how the sum is computed; enumerating compositions is left to the
    oracle tests.  Exact mode requires integer 2*beta.
    """
    beta, n = query.beta, query.n
    if n < 2:
        raise ValueError(f"order moment sum requires n >= 2, got {n}")
    if query.mode == "exact":
        tb = _as_exact_exponent(2 * beta, "2*beta")
        kernel = functools.partial(_mediant_power_frame, two_beta=tb)
        depth = split_depth if split_depth is not None else min(n - 2, 6)
        value: Fraction | float = traverse_reduce(
            n - 1, depth, kernel, operator.add, workers=workers
        )
    else:
        value = parallel_subtree_sums(
            n - 1,
            functools.partial(_mediant_power_leaf, two_beta=2.0 * beta),
            workers=workers,
            split_depth=split_depth,
        )
    return SeriesSample(n, beta, value, "sigma_Q", query.mode)


# ---------------------------------------------------------------------------
# partition of the composition set


def default_w(n: int) -> int:
    """Dominance window floor(n/2) - 2, clamped into [1, n]."""
    return min(n, max(1, n // 2 - 2))


def default_r(beta: float, scheme: Scheme = "interval") -> float:
    """Continuant cutoff exponent optimizing the scheme's error terms."""
    if beta <= 1:
        raise BetaRangeError(f"default r needs beta > 1, got {beta}")
    if scheme == "interval":
        return 3 * beta / (2 * (beta - 1)) + 0.5
    if scheme == "continuant":
        return (2 * beta - 1) / (beta - 1)
    raise ValueError(f"unknown scheme {scheme!r}")


def small_window(n: int, beta: float) -> int:
    """Sublinear dominance window n^((2b+3)/(4b+1)) * log^(4b/(4b+1)) n,
    capped at n/2 - 2; the choice balancing the order-sum error terms."""
    if beta <= 1:
        raise BetaRangeError(f"small_window needs beta > 1, got {beta}")
    expo = (2 * beta + 3) / (4 * beta + 1)
    logpow = 4 * beta / (4 * beta + 1)
    w = min(n / 2 - 2, n**expo * math.log(n) ** logpow)
    return max(1, int(w))


@dataclass(frozen=True)
class PartitionParams:
    """Cutoffs for the composition partition: continuant cutoff n^r and
    dominance threshold n - w."""

    r: float
    w: int

    def __post_init__(self) -> None:
        if self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if self.w < 1:
            raise ValueError(f"w must be >= 1, got {self.w}")

    def half_window(self, n: int) -> bool:
        """w < n/2: every composition has at most one part above n - w."""
        return 2 * self.w < n

    def narrow_window(self, n: int) -> bool:
        """w <= n/2 - 2: the dominant part exceeds every other part."""
        return self.w <= n / 2 - 2


def default_params(n: int, beta: float, scheme: Scheme = "interval") -> PartitionParams:
    return PartitionParams(r=default_r(beta, scheme), w=default_w(n))


def _rationalize_exponent(r: float) -> Fraction | None:
    cand = Fraction(r).limit_denominator(64)
    if cand >= 1 and abs(float(cand) - r) < 1e-12:
        return cand
    return None


def below_power(q: int, n: int, r: float) -> bool:
    """Exact predicate q < n^r for integer q.

    For (near-)rational r = p/d the comparison is done on integers as
    q^d < n^p; otherwise n^r is evaluated with 50-digit decimals, which
    leaves no ambiguity for the continuant sizes in range.
    """
    if q < 1:
        raise ValueError(f"q must be positive, got {q}")
    frac = _rationalize_exponent(r)
    if frac is not None:
        return q ** frac.denominator < n ** frac.numerator
    with localcontext() as ctx:
        ctx.prec = 50
        power = (Decimal(r) * Decimal(n).ln()).exp()
    return Decimal(q) < power


@dataclass(frozen=True)
class PartitionReport:
    """Partial sums of one moment sum over the partition classes.

    Continuant scheme classes (weight q^(-2*beta)):
      large_continuant   q >= n^r
      dominant           q < n^r and max part > n - w
      balanced           q < n^r and max part <= n - w

    Interval scheme classes (weight (q*q_minus)^-beta + (q*q_plus)^-beta):
      large_continuant, balanced as above, and the dominant class split
      into dominant_inner (the largest part is not strictly last) and
      dominant_last, whose two weight halves are reported separately as
      dominant_last_wide (q*q_minus branch, the wider neighbor gap) and
      dominant_last_narrow (q*q_plus branch).
    """

    n: int
    beta: float
    scheme: Scheme
    mode: Mode
    params: PartitionParams
    sums: dict[str, Fraction | float]
    counts: dict[str, int]
    whole: Fraction | float

    def parts_total(self) -> Fraction | float:
        return sum(self.sums.values())


def partition_sums(
    n: int,
    beta: float,
    params: PartitionParams | None = None,
    scheme: Scheme = "continuant",
    mode: Mode = "exact",
) -> PartitionReport:
    """Classify every canonical composition of n and sum its weight per class."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if beta <= 1:
        raise BetaRangeError(f"partition sums require beta > 1, got {beta}")
    if params is None:
        params = default_params(n, beta, scheme)
    if params.w > n:
        raise ValueError(f"w must be <= n, got w={params.w}, n={n}")
    if scheme not in ("continuant", "interval"):
        raise ValueError(f"unknown scheme {scheme!r}")
    if mode == "exact":
        if scheme == "continuant":
            _as_exact_exponent(2 * beta, "2*beta")
        else:
            _as_exact_exponent(beta, "beta")

    zero: Fraction | float = Fraction(0) if mode == "exact" else 0.0
    if scheme == "continuant":
        sum_keys = ["large_continuant", "dominant", "balanced"]
        count_keys = sum_keys
    else:
        sum_keys = [
            "large_continuant",
            "balanced",
            "dominant_inner",
            "dominant_last_wide",
            "dominant_last_narrow",
        ]
        count_keys = ["large_continuant", "balanced", "dominant_inner", "dominant_last"]
    sums: dict[str, Fraction | float] = {k: zero for k in sum_keys}
    counts = {k: 0 for k in count_keys}

    threshold_cache: dict[int, bool] = {}

    def small_continuant(q: int) -> bool:
        hit = threshold_cache.get(q)
        if hit is None:
            hit = below_power(q, n, params.r)
            threshold_cache[q] = hit
        return hit

    for parts in canonical_compositions(n):
        q, q_minus, q_plus = neighbor_denominators(parts)
        dominant = max(parts) > n - params.w
        if scheme == "continuant":
            if mode == "exact":
                weight: Fraction | float = Fraction(1, q ** int(2 * beta))
            else:
                weight = float(q) ** (-2.0 * beta)
            if not small_continuant(q):
                cls = "large_continuant"
            elif dominant:
                cls = "dominant"
            else:
                cls = "balanced"
            sums[cls] += weight
            counts[cls] += 1
        else:
            if mode == "exact":
                b = int(beta)
                wide: Fraction | float = Fraction(1, (q * q_minus) ** b)
                narrow: Fraction | float = Fraction(1, (q * q_plus) ** b)
            else:
                wide = float(q * q_minus) ** (-beta)
                narrow = float(q * q_plus) ** (-beta)
            if not small_continuant(q):
                sums["large_continuant"] += wide + narrow
                counts["large_continuant"] += 1
            elif not dominant:
                sums["balanced"] += wide + narrow
                counts["balanced"] += 1
            elif parts[-1] > max(parts[:-1], default=0):
                sums["dominant_last_wide"] += wide
                sums["dominant_last_narrow"] += narrow
                counts["dominant_last"] += 1
            else:
                sums["dominant_inner"] += wide + narrow
                counts["dominant_inner"] += 1

    query = MomentQuery(beta, n, mode)
    whole = (sigma_q(query) if scheme == "continuant" else sigma_f(query)).value
    return PartitionReport(n, beta, scheme, mode, params, sums, counts, whole)


# ---------------------------------------------------------------------------
# identities and decomposition oracles


def _adjacent_gap_frame(frame: GapFrame) -> Fraction:
    a, b = frame.q_left, frame.q_right
    m = a + b
    return Fraction(1, m * a) + Fraction(1, m * b)


def adjacent_gap_sum(n: int, method: str = "traverse") -> Fraction:
    """Exact sum of 1/(q*q_minus) + 1/(q*q_plus) over all fractions new
    at level n; the two neighbor gaps of the new fractions tile the unit
    interval, so the value is exactly 1.

    The traversal path evaluates the two sub-gaps each mediant creates
    in the gaps of level n-1 and has no size guard; the enumeration path
    walks the canonical compositions of n (guard at 22).
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if method == "traverse":
        return traverse_reduce(n - 1, min(n - 2, 6), _adjacent_gap_frame, operator.add)
    if method == "enumerate":
        if n > ADJACENT_SUM_GUARD:
            raise GuardError(f"enumeration path guarded at n <= {ADJACENT_SUM_GUARD}")
        total = Fraction(0)
        for parts in canonical_compositions(n):
            q, q_minus, q_plus = neighbor_denominators(parts)
            total += Fraction(1, q * q_minus) + Fraction(1, q * q_plus)
        return total
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class DecompositionCheck:
    """Comparison of the dominant-part set with its parametrization."""

    n: int
    w: int
    direct_count: int
    parametrized_count: int
    sets_equal: bool
    disjoint: bool

    @property
    def passed(self) -> bool:
        return self.sets_equal and self.disjoint


def big_part_decomposition_check(n: int, w: int) -> DecompositionCheck:
    """Check that {compositions of n with a part > n - w} decomposes
    uniquely as (prefix, big part, suffix).

    The parametrization runs over big parts X in (n-w, n], arbitrary
    prefix compositions of u and empty-or-canonical suffix compositions
    of v with u + v = n - X.  Requires w < n/2, which forces the big
    part to be unique.
    """
    if not 1 <= w:
        raise ValueError(f"w must be >= 1, got {w}")
    if 2 * w >= n:
        raise ValueError(f"decomposition requires w < n/2, got w={w}, n={n}")
    if n > DECOMPOSITION_GUARD:
        raise GuardError(f"decomposition check guarded at n <= {DECOMPOSITION_GUARD}")

    direct = {
        parts for parts in canonical_compositions(n) if max(parts) > n - w
    }

    produced: list[tuple[int, ...]] = []
    for big in range(n - w + 1, n + 1):
        rest = n - big
        for u in range(rest + 1):
            v = rest - u
            suffixes: list[tuple[int, ...]] = [()] if v == 0 else (
                [] if v == 1 else list(canonical_compositions(v))
            )
            for prefix in all_compositions(u):
                for suffix in suffixes:
                    produced.append(prefix + (big,) + suffix)

    disjoint = len(produced) == len(set(produced))
    return DecompositionCheck(
        n=n,
        w=w,
        direct_count=len(direct),
        parametrized_count=len(produced),
        sets_equal=set(produced) == direct,
        disjoint=disjoint,
    )


def flank_moment_sum(n: int, w: int, beta: float) -> float:
    """Sum of (K(prefix) * K(suffix))^(-2*beta) over the compositions of
    n having a (necessarily unique) part above n - w, where prefix and
    suffix flank that part.

    For fixed (w, beta) the value does not depend on n once n > 2w, and
    it converges to the enumerated flank limit as w grows.
    """
    if beta <= 1:
        raise BetaRangeError(f"flank moment sum requires beta > 1, got {beta}")
    if 2 * w >= n:
        raise ValueError(f"flank moment sum requires w < n/2, got w={w}, n={n}")
    if n > FLANK_GUARD:
        raise GuardError(f"flank moment sum guarded at n <= {FLANK_GUARD}")
    total = 0.0
    cut = n - w
    for parts in canonical_compositions(n):
        for j, part in enumerate(parts):
            if part > cut:
                prefix_k = continuant(parts[:j])
                suffix_k = continuant(parts[j + 1 :])
                total += float(prefix_k * suffix_k) ** (-2.0 * beta)
                break
    return total


# ---------------------------------------------------------------------------
# series coefficients


def binomial_series_coeff(beta: float, k: int) -> float:
    """k-th coefficient of the binomial series (1-x)^(-beta):
    beta*(beta+1)*...*(beta+k-1) / k!."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    value = 1.0
    for i in range(k):
        value *= (beta + i) / (i + 1)
    return value


#: Correction-coefficient families, named by where the dominant quotient
#: sits and which neighbor-gap branch is weighted:
#:   last_wide     dominant quotient last, wider gap 1/(q*q_minus)
#:   last_narrow   dominant quotient last, narrower gap 1/(q*q_plus)
#:   inner_wide    dominant quotient interior, wider gap
#:   inner_narrow  dominant quotient interior, narrower gap
#:   order         corrections of the order moment sum (weight q^(-2*beta))
COEFFICIENT_KINDS = ("last_wide", "last_narrow", "inner_wide", "inner_narrow", "order")


@dataclass(frozen=True)
class TruncatedCoefficient:
    kind: str
    k: int
    beta: float
    v_max: int
    value: float
    tail_estimate: float
    disputed: bool = False


_SCAN_CHUNK = 1 << 19


def _scan_compositions(v_max: int, record, need_num: bool) -> None:
    """Visit every composition with part sum <= v_max, grouped by sum.

    States carry the continuant pair (K(minus-last), K(full)) and, when
    need_num is set, the matching numerator pair, plus a last-part-is-1
    flag.  Children of a composition are "append part 1" and "increment
    the last part"; both raise the part sum by exactly 1, so level v
    holds the 2^(v-1) compositions of v.  record(v, dp, d, npv, nv,
    last1) may be called several times per level (chunking); the chunk
    order is deterministic.
    """

    def expand(v, dp, d, npv, nv, last1):
        record(v, dp, d, npv, nv, last1)
        if v == v_max:
            return
        size = d.size
        d_child = d + dp
        n_child = nv + npv if need_num else None
        if 2 * size <= _SCAN_CHUNK:
            dp2 = np.concatenate([d, dp])
            d2 = np.concatenate([d_child, d_child])
            np2 = np.concatenate([nv, npv]) if need_num else None
            n2 = np.concatenate([n_child, n_child]) if need_num else None
            last2 = np.concatenate([np.ones(size, bool), np.zeros(size, bool)])
            expand(v + 1, dp2, d2, np2, n2, last2)
        else:
            expand(v + 1, d, d_child, nv, n_child, np.ones(size, bool))
            expand(v + 1, dp, d_child, npv, n_child, np.zeros(size, bool))

    dp0 = np.array([1], dtype=np.int64)
    d0 = np.array([1], dtype=np.int64)
    np0 = np.array([0], dtype=np.int64) if need_num else None
    n0 = np.array([1], dtype=np.int64) if need_num else None
    expand(1, dp0, d0, np0, n0, np.array([True]))


def _multinomials3(k: int) -> list[tuple[int, int, int, int]]:
    """(i, j, h, k!/(i! j! h!)) over i + j + h = k."""
    out = []
    for i in range(k + 1):
        for j in range(k + 1 - i):
            h = k - i - j
            coef = math.factorial(k) // (
                math.factorial(i) * math.factorial(j) * math.factorial(h)
            )
            out.append((i, j, h, coef))
    return out


def _coefficient_threshold(kind: str, beta: float) -> tuple[float, float]:
    """(largest admissible k exclusive bound, per-term decay exponent base).

    The decay exponent of the level-v term is decay_base - k; the series
    converges while k stays below the bound.
    """
    if kind in ("last_wide", "last_narrow"):
        return 2 * beta - 1, 2 * beta
    if kind == "order":
        return 2 * beta - 2, 2 * beta - 1
    if kind == "inner_wide":
        return beta - 2, beta - 1
    if kind == "inner_narrow":
        return 2 * beta - 2, 2 * beta - 1
    raise ValueError(f"unknown coefficient kind {kind!r}; choose from {COEFFICIENT_KINDS}")


def truncated_coefficient(kind: str, k: int, beta: float, v_max: int) -> TruncatedCoefficient:
    """Evaluate a correction-coefficient series truncated at part sum v_max.

    Every term is assembled from continuants, forward and reversed
    continued-fraction values, and binomial-series coefficients over the
    indicated composition family; all terms are positive, so the value
    increases monotonically in v_max.  The tail estimate extrapolates
    the last level's contribution with the series' power-law decay.

    For inner_narrow, k in [beta-2, 2*beta-2) is admitted but flagged
    disputed: the two convergence analyses for the inner families
    disagree there.
    """
    if beta <= 1:
        raise BetaRangeError(f"coefficient series require beta > 1, got {beta}")
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if not 1 <= v_max <= COEFF_GUARD:
        raise GuardError(f"v_max must lie in [1, {COEFF_GUARD}], got {v_max}")
    bound, decay_base = _coefficient_threshold(kind, beta)
    disputed = False
    if kind == "inner_narrow" and k >= beta - 2:
        disputed = True
    if not k < bound:
        raise ValueError(
            f"series for kind {kind!r} diverges at k={k} (needs k < {bound:g} for beta={beta:g})"
        )

    level_terms = [0.0] * (v_max + 1)

    if kind in ("last_wide", "last_narrow"):
        gamma = binomial_series_coeff
        pairs = [(l, k - l) for l in range(k + 1)]

        def record(v, dp, d, npv, nv, last1):
            if v < 2:
                return
            mask = ~last1
            if not mask.any():
                return
            q = d[mask].astype(np.float64)
            x = dp[mask].astype(np.float64) / q
            w = q ** (-2.0 * beta)
            if kind == "last_wide":
                level_terms[v] += float(np.sum(w * (v - x) ** k))
            else:
                poly = np.zeros_like(q)
                for l, m in pairs:
                    poly += (
                        gamma(beta, l) * gamma(beta, m) * (v - x) ** l * (v + 1 - x) ** m
                    )
                level_terms[v] += float(np.sum(w * poly))

        _scan_compositions(v_max, record, need_num=False)
        if kind == "last_wide":
            scale = 2.0 * binomial_series_coeff(beta, k)
        else:
            scale = 2.0
        for v in range(v_max + 1):
            level_terms[v] *= scale

    else:
        # Pair families: arbitrary prefix P and a suffix S that is
        # empty-or-canonical (order) or nonempty canonical (inner_*).
        # Assembled from per-sum moment tables so the pair sum stays
        # polynomial in v_max.
        mp = np.zeros((v_max + 1, k + 1))  # prefix moments of x = reversed cf value
        mp[0, 0] = 1.0
        if kind == "order":
            ms = np.zeros((v_max + 1, k + 1))
            ms[0, 0] = 1.0
        else:
            ns = np.zeros((v_max + 1, k + 1, k + 1))

        def record(v, dp, d, npv, nv, last1):
            q = d.astype(np.float64)
            x = dp.astype(np.float64) / q
            wp = q ** (-2.0 * beta)
            for i in range(k + 1):
                mp[v, i] += float(np.sum(wp * x**i))
            mask = ~last1
            if v < 2 or not mask.any():
                return
            qs = d[mask].astype(np.float64)
            y2 = nv[mask].astype(np.float64) / qs
            if kind == "order":
                wsuf = qs ** (-2.0 * beta)
                for j in range(k + 1):
                    ms[v, j] += float(np.sum(wsuf * y2**j))
            else:
                if kind == "inner_wide":
                    other = dp[mask].astype(np.float64)
                    y1 = npv[mask].astype(np.float64) / other
                else:
                    other = (d[mask] - dp[mask]).astype(np.float64)
                    y1 = (nv[mask] - npv[mask]).astype(np.float64) / other
                wsuf = (qs * other) ** (-beta)
                for h1 in range(k + 1):
                    for h2 in range(k + 1 - h1):
                        ns[v, h1, h2] += float(np.sum(wsuf * y1**h1 * y2**h2))

        _scan_compositions(v_max, record, need_num=True)

        if kind == "order":
            terms3 = _multinomials3(k)
            gk = binomial_series_coeff(2 * beta, k)
            for v in range(1, v_max + 1):
                total = 0.0
                for u in range(v + 1):
                    s = v - u
                    for i, j, h, coef in terms3:
                        total += (
                            coef
                            * float(v) ** i
                            * (-1.0) ** (j + h)
                            * mp[u, j]
                            * ms[s, h]
                        )
                level_terms[v] = gk * total
        else:
            gamma = binomial_series_coeff
            expansions = [_multinomials3(l) for l in range(k + 1)]
            for v in range(2, v_max + 1):
                total = 0.0
                for l in range(k + 1):
                    m = k - l
                    g = gamma(beta, l) * gamma(beta, m)
                    for i1, j1, h1, c1 in expansions[l]:
                        for i2, j2, h2, c2 in expansions[m]:
                            sign = (-1.0) ** (j1 + h1 + j2 + h2)
                            vpow = float(v) ** (i1 + i2)
                            acc = 0.0
                            for u in range(v - 1):
                                acc += mp[u, j1 + j2] * ns[v - u, h1, h2]
                            total += g * c1 * c2 * sign * vpow * acc
                level_terms[v] = total

    value = math.fsum(level_terms)
    decay = decay_base - k
    tail = abs(level_terms[v_max]) * v_max / (decay - 1.0) if decay > 1 else math.inf
    return TruncatedCoefficient(kind, k, beta, v_max, value, tail, disputed)


# ---------------------------------------------------------------------------
# bound suites


@dataclass(frozen=True)
class BoundCheck:
    name: str
    lhs: float
    bound: float
    passed: bool


@dataclass(frozen=True)
class BoundsReport:
    n: int
    beta: float
    params: PartitionParams
    hard_checks: list[BoundCheck] = field(default_factory=list)
    soft_ratios: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.hard_checks)


def bounds_report(n: int, beta: float, params: PartitionParams | None = None) -> BoundsReport:
    """Assert the hard tail and depth inequalities; report the soft
    balanced-class bounds as monitored ratios only.

    Hard:  large-continuant moment <= 2^(beta-1) / n^(2r(beta-1));
           composition length <= DEPTH_FACTOR * r * ln n below the cutoff;
           large-continuant interval moment <= 1 / n^((beta-1)(2r-1)).
    Soft:  balanced-class sums divided by their n^2 log^cb(n) / w^cb
           shapes (cb = 4*beta and 3*beta), never asserted.
    """
    if beta <= 1:
        raise BetaRangeError(f"bounds require beta > 1, got {beta}")
    if n > BOUNDS_GUARD:
        raise GuardError(f"bounds report guarded at n <= {BOUNDS_GUARD}")
    if params is None:
        params = default_params(n, beta)
    r, w = params.r, params.w

    large_cont = 0.0
    large_interval = 0.0
    balanced_cont = 0.0
    balanced_interval = 0.0
    max_depth_small = 0
    depth_cap = DEPTH_FACTOR * r * math.log(n)
    for parts in canonical_compositions(n):
        q, q_minus, q_plus = neighbor_denominators(parts)
        interval_weight = float(q * q_minus) ** (-beta) + float(q * q_plus) ** (-beta)
        cont_weight = float(q) ** (-2.0 * beta)
        if below_power(q, n, r):
            max_depth_small = max(max_depth_small, len(parts))
            if max(parts) <= n - w:
                balanced_cont += cont_weight
                balanced_interval += interval_weight
        else:
            large_cont += cont_weight
            large_interval += interval_weight

    hard = [
        BoundCheck(
            "large-continuant-moment",
            large_cont,
            2.0 ** (beta - 1) / n ** (2 * r * (beta - 1)),
            large_cont <= 2.0 ** (beta - 1) / n ** (2 * r * (beta - 1)),
        ),
        BoundCheck(
            "depth-within-cutoff",
            float(max_depth_small),
            depth_cap,
            max_depth_small <= depth_cap,
        ),
        BoundCheck(
            "large-continuant-interval-moment",
            large_interval,
            n ** (-(beta - 1) * (2 * r - 1)),
            large_interval <= n ** (-(beta - 1) * (2 * r - 1)),
        ),
    ]
    logn = math.log(n)
    soft = {
        "balanced-continuant-ratio": balanced_cont / (n**2 * logn ** (4 * beta) / w ** (4 * beta)),
        "balanced-interval-ratio": balanced_interval
        / (n**2 * logn ** (3 * beta) / w ** (3 * beta)),
    }
    return BoundsReport(n, beta, params, hard, soft)
