"""Shared fixtures: the heavyweight float series are computed once per
session and reused by the acceptance criteria."""

import time

import pytest

from brocot import MomentQuery, sigma_f, sigma_q

ACCEPTANCE_WORKERS = 8
N_LO, N_HI = 8, 30


@pytest.fixture(scope="session")
def interval_series_beta2():
    """sigma_F samples for beta=2, n in [8, 30], with elapsed seconds."""
    start = time.monotonic()
    samples = [
        sigma_f(MomentQuery(2.0, n), workers=ACCEPTANCE_WORKERS)
        for n in range(N_LO, N_HI + 1)
    ]
    return samples, time.monotonic() - start


@pytest.fixture(scope="session")
def interval_series_beta125():
    start = time.monotonic()
    samples = [
        sigma_f(MomentQuery(1.25, n), workers=ACCEPTANCE_WORKERS)
        for n in range(N_LO, N_HI + 1)
    ]
    return samples, time.monotonic() - start


@pytest.fixture(scope="session")
def order_series_beta2():
    samples = [
        sigma_q(MomentQuery(2.0, n), workers=ACCEPTANCE_WORKERS)
        for n in range(N_LO, N_HI + 1)
    ]
    return samples


@pytest.fixture(scope="session")
def order_values_beta2(order_series_beta2):
    """sigma_Q(v) for v in [2, 30], indexed by v (entries 0 and 1 unused)."""
    values = [None] * (N_HI + 1)
    for s in order_series_beta2:
        values[s.n] = float(s.value)
    for v in range(2, N_LO):
        values[v] = float(sigma_q(MomentQuery(2.0, v)).value)
    return values
