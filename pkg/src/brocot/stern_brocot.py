"""Mediant construction of the nested fraction levels and the traversal
engine every moment sum is built on.

Level 1 is {0/1, 1/1}.  Level n+1 inserts the mediant of every
neighboring pair of level n, so level n has 2^(n-1) + 1 fractions and
2^(n-1) gaps.  Each gap is represented by the coprime denominator pair
(q_left, q_right) of its endpoints; the gap length is exactly
1/(q_left*q_right).  The gap tree is generated by the recursion

    children(a, b) = (a, a+b), (a+b, b)       root (1, 1) at depth 0,

where the root is the single gap of level 1 and the frames at depth n-1
are the gaps of level n, in left-to-right order.
"""

from __future__ import annotations

import functools
import math
import multiprocessing
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, NamedTuple, TypeVar

import numpy as np

__all__ = [
    "ENV_WORKERS",
    "GapFrame",
    "GuardError",
    "LEVEL_GUARD",
    "LevelStats",
    "brocot_order",
    "cf_of_fraction",
    "default_split_depth",
    "gaps",
    "level",
    "level_stats",
    "mediant",
    "parallel_subtree_sums",
    "resolve_workers",
    "traverse_reduce",
]

A = TypeVar("A")

LEVEL_GUARD = 24  # level(24) materializes ~8M fractions
ENV_WORKERS = "BROCOT_WORKERS"

# Subtrees handed to one float reduction; 2^16 leaves keeps the numpy
# working set small while amortizing per-call overhead.
_SUBTREE_LEAF_DEPTH = 16


class GuardError(ValueError):
    """A size guard would be exceeded and no override was requested."""


class GapFrame(NamedTuple):
    """Denominator pair bounding one partition interval."""

    q_left: int
    q_right: int
    depth: int


@dataclass(frozen=True)
class LevelStats:
    n: int
    count_fractions: int
    count_gaps: int
    min_gap: Fraction
    max_gap: Fraction


def mediant(x: Fraction, y: Fraction) -> Fraction:
    """The fraction (p+p')/(q+q'); between x and y, and already reduced
    whenever x and y are level neighbors (unimodularity)."""
    return Fraction(x.numerator + y.numerator, x.denominator + y.denominator)


def level(n: int, override_guard: bool = False) -> list[Fraction]:
    """All fractions of level n in increasing order.

    Memory grows like 2^n; levels above LEVEL_GUARD are refused unless
    override_guard is set.  Use gaps()/traverse_reduce() for large n.
    """
    if n < 1:
        raise ValueError(f"level index must be >= 1, got {n}")
    if n > LEVEL_GUARD and not override_guard:
        raise GuardError(
            f"level({n}) would materialize 2^{n - 1} + 1 fractions; "
            f"guard is {LEVEL_GUARD} (pass override_guard=True to force)"
        )
    fractions = [Fraction(0), Fraction(1)]
    for _ in range(n - 1):
        nxt = []
        for left, right in zip(fractions, fractions[1:]):
            nxt.append(left)
            nxt.append(mediant(left, right))
        nxt.append(fractions[-1])
        fractions = nxt
    return fractions


def level_stats(n: int) -> LevelStats:
    """Counts and extreme gap lengths of level n (exact)."""
    count_gaps = 1 << (n - 1)
    min_gap = None
    max_gap = None
    for frame in gaps(n):
        g = Fraction(1, frame.q_left * frame.q_right)
        if min_gap is None or g < min_gap:
            min_gap = g
        if max_gap is None or g > max_gap:
            max_gap = g
    return LevelStats(n, count_gaps + 1, count_gaps, min_gap, max_gap)


def gaps(n: int) -> Iterator[GapFrame]:
    """Stream the 2^(n-1) gaps of level n in left-to-right order."""
    if n < 1:
        raise ValueError(f"level index must be >= 1, got {n}")
    stack = [(1, 1, n - 1)]
    depth = n - 1
    while stack:
        a, b, remaining = stack.pop()
        if remaining == 0:
            yield GapFrame(a, b, depth)
        else:
            m = a + b
            stack.append((m, b, remaining - 1))
            stack.append((a, m, remaining - 1))


def _subtree_roots(split_depth: int) -> list[tuple[int, int]]:
    roots = [(1, 1)]
    for _ in range(split_depth):
        roots = [child for a, b in roots for child in ((a, a + b), (a + b, b))]
    return roots


def default_split_depth(n: int) -> int:
    """Split so a subtree holds at most 2^16 leaves."""
    return max(0, n - 1 - _SUBTREE_LEAF_DEPTH)


def resolve_workers(workers: int | None) -> int:
    """Explicit worker count, else the BROCOT_WORKERS variable, else 1."""
    if workers is not None:
        if workers < 1:
            raise ValueError(f"worker count must be >= 1, got {workers}")
        return workers
    env = os.environ.get(ENV_WORKERS)
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise ValueError(f"{ENV_WORKERS}={env!r} is not an integer") from exc
        if value >= 1:
            return value
    return 1


def _fold_subtree(a: int, b: int, depth: int, frame_kernel, combine):
    """Sequential left-to-right fold of one subtree."""
    acc = None
    stack = [(a, b, depth)]
    while stack:
        qa, qb, remaining = stack.pop()
        if remaining == 0:
            value = frame_kernel(GapFrame(qa, qb, depth))
            acc = value if acc is None else combine(acc, value)
        else:
            m = qa + qb
            stack.append((m, qb, remaining - 1))
            stack.append((qa, m, remaining - 1))
    return acc


def _fold_task(args):
    a, b, depth, frame_kernel, combine = args
    return _fold_subtree(a, b, depth, frame_kernel, combine)


def traverse_reduce(
    n: int,
    split_depth: int,
    frame_kernel: Callable[[GapFrame], A],
    combine: Callable[[A, A], A],
    workers: int | None = None,
) -> A:
    """Fold frame_kernel over the gaps of level n.

    The result equals the sequential left-to-right fold for any
    associative combine: the tree is cut into 2^split_depth subtrees,
    each folded sequentially, and the subtree results are merged in
    subtree-index order.  That fixed order makes the value identical for
    every worker count (and, for exact kernels, for every split depth).

    Parallel execution forks worker processes, so frame_kernel and
    combine must be picklable (module-level functions) when workers > 1.
    """
    if n < 1:
        raise ValueError(f"level index must be >= 1, got {n}")
    if not 0 <= split_depth <= n - 1:
        raise ValueError(f"split_depth must lie in [0, {n - 1}], got {split_depth}")
    workers = resolve_workers(workers)
    subtree_depth = n - 1 - split_depth
    roots = _subtree_roots(split_depth)
    if workers == 1 or len(roots) == 1:
        parts = [_fold_subtree(a, b, subtree_depth, frame_kernel, combine) for a, b in roots]
    else:
        tasks = [(a, b, subtree_depth, frame_kernel, combine) for a, b in roots]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=workers) as pool:
            parts = pool.map(_fold_task, tasks, chunksize=max(1, len(tasks) // (4 * workers)))
    return functools.reduce(combine, parts)


def _leaf_pairs(a: int, b: int, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """All depth-level descendants of frame (a, b), left to right."""
    qa = np.array([a], dtype=np.int64)
    qb = np.array([b], dtype=np.int64)
    for _ in range(depth):
        m = qa + qb
        qa2 = np.empty(2 * qa.size, dtype=np.int64)
        qb2 = np.empty_like(qa2)
        qa2[0::2] = qa
        qa2[1::2] = m
        qb2[0::2] = m
        qb2[1::2] = qb
        qa, qb = qa2, qb2
    return qa, qb


def _leaf_sum_task(args):
    a, b, depth, leaf_sum = args
    qa, qb = _leaf_pairs(a, b, depth)
    return float(np.sum(leaf_sum(qa, qb)))


def parallel_subtree_sums(
    n: int,
    leaf_sum: Callable[[np.ndarray, np.ndarray], np.ndarray],
    workers: int | None = None,
    split_depth: int | None = None,
) -> float:
    """Deterministic float sum of leaf_sum over the gaps of level n.

    leaf_sum maps the (q_left, q_right) arrays of one subtree to the
    per-gap values.  Each subtree is reduced by numpy's pairwise
    summation over its fixed leaf array; the per-subtree totals are then
    combined with math.fsum, whose exactly-rounded result does not
    depend on grouping.  The returned float is therefore bitwise
    identical for every worker count and across runs.
    """
    if n < 1:
        raise ValueError(f"level index must be >= 1, got {n}")
    if split_depth is None:
        split_depth = default_split_depth(n)
    if not 0 <= split_depth <= n - 1:
        raise ValueError(f"split_depth must lie in [0, {n - 1}], got {split_depth}")
    workers = resolve_workers(workers)
    subtree_depth = n - 1 - split_depth
    roots = _subtree_roots(split_depth)
    tasks = [(a, b, subtree_depth, leaf_sum) for a, b in roots]
    if workers == 1 or len(tasks) == 1:
        parts = [_leaf_sum_task(t) for t in tasks]
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=workers) as pool:
            parts = pool.map(_leaf_sum_task, tasks, chunksize=max(1, len(tasks) // (4 * workers)))
    return math.fsum(parts)


def cf_of_fraction(x: Fraction) -> tuple[int, ...]:
    """Canonical partial quotients of a fraction in (0, 1).

    The Euclidean algorithm on (denominator, numerator) always ends
    with a final quotient >= 2, so the expansion is canonical and
    cf_value() reproduces x exactly.
    """
    if not 0 < x < 1:
        raise ValueError(f"fraction must lie strictly between 0 and 1, got {x}")
    p, q = x.numerator, x.denominator
    parts = []
    while p:
        a, r = divmod(q, p)
        parts.append(a)
        q, p = p, r
    return tuple(parts)


def brocot_order(x: Fraction) -> int:
    """Level at which x first appears: the sum of its partial quotients."""
    return sum(cf_of_fraction(x))
