import math
from fractions import Fraction

import pytest

from brocot.brocot_sums import (
    BetaRangeError,
    MomentQuery,
    PartitionParams,
    adjacent_gap_sum,
    all_compositions,
    big_part_decomposition_check,
    binomial_series_coeff,
    bounds_report,
    below_power,
    canonical_compositions,
    default_r,
    default_w,
    flank_moment_sum,
    partition_sums,
    sigma_f,
    sigma_q,
    truncated_coefficient,
)
from brocot.continuants import cf_value, continuant, neighbor_denominators, reversed_cf_value
from brocot.stern_brocot import GuardError

F = Fraction


# ---------------------------------------------------------------------------
# moment sums


def test_sigma_f_exact_examples():
    assert sigma_f(MomentQuery(1.0, 9, "exact")).value == 1
    assert sigma_f(MomentQuery(2.0, 2, "exact")).value == F(1, 2)
    assert sigma_f(MomentQuery(2.0, 3, "exact")).value == F(5, 18)


def test_sigma_q_exact_examples():
    assert sigma_q(MomentQuery(2.0, 2, "exact")).value == F(1, 16)
    assert sigma_q(MomentQuery(2.0, 3, "exact")).value == 2 * F(1, 81)
    assert sigma_q(MomentQuery(1.0, 4, "exact")).value == F(41, 200)


def test_sample_metadata():
    sample = sigma_f(MomentQuery(2.0, 5, "exact"))
    assert (sample.n, sample.beta, sample.kind, sample.mode) == (5, 2.0, "sigma_F", "exact")
    sample = sigma_q(MomentQuery(2.0, 5))
    assert sample.kind == "sigma_Q" and sample.mode == "fast-float"


def test_mode_and_domain_validation():
    with pytest.raises(ValueError):
        sigma_f(MomentQuery(1.5, 5, "exact"))  # non-integer beta in exact mode
    with pytest.raises(ValueError):
        sigma_q(MomentQuery(1.25, 5, "exact"))  # non-integer 2*beta
    with pytest.raises(ValueError):
        sigma_q(MomentQuery(2.0, 1))
    with pytest.raises(BetaRangeError):
        MomentQuery(0.5, 5)
    with pytest.raises(ValueError):
        MomentQuery(2.0, 5, "float32")
    # half-integer beta is exact for the order sum
    assert sigma_q(MomentQuery(1.5, 4, "exact")).value == F(1, 32) + F(2, 125)


def test_float_matches_exact():
    for n in range(2, 12):
        exact = sigma_f(MomentQuery(2.0, n, "exact")).value
        fast = sigma_f(MomentQuery(2.0, n)).value
        assert fast == pytest.approx(float(exact), rel=1e-13)


@pytest.mark.parametrize("beta", [1.25, 2.0])
def test_monotone_refinement(beta):
    values = [float(sigma_f(MomentQuery(beta, n)).value) for n in range(1, 15)]
    assert all(b < a for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# composition enumeration


def test_canonical_compositions_examples():
    assert set(canonical_compositions(2)) == {(2,)}
    assert set(canonical_compositions(3)) == {(3,), (1, 2)}
    assert set(canonical_compositions(4)) == {(4,), (1, 3), (2, 2), (1, 1, 2)}


@pytest.mark.parametrize("n", range(2, 13))
def test_canonical_compositions_count(n):
    comps = list(canonical_compositions(n))
    assert len(comps) == 2 ** (n - 2)
    assert len(set(comps)) == len(comps)
    assert all(sum(c) == n and c[-1] >= 2 for c in comps)


def test_canonical_compositions_guard():
    with pytest.raises(GuardError):
        list(canonical_compositions(27))
    with pytest.raises(ValueError):
        list(canonical_compositions(1))


def test_all_compositions():
    assert list(all_compositions(0)) == [()]
    assert set(all_compositions(3)) == {(3,), (1, 2), (2, 1), (1, 1, 1)}
    assert len(list(all_compositions(10))) == 512


@pytest.mark.parametrize("n", range(2, 13))
def test_order_moment_oracle_equivalence(n):
    enumerated = sum(F(1, continuant(c) ** 4) for c in canonical_compositions(n))
    assert sigma_q(MomentQuery(2.0, n, "exact")).value == enumerated


@pytest.mark.parametrize("n", range(2, 11))
def test_interval_moment_equals_neighbor_weights(n):
    # each new fraction contributes its two neighbor gaps once
    total = F(0)
    for parts in canonical_compositions(n):
        q, qm, qp = neighbor_denominators(parts)
        total += F(1, (q * qm) ** 2) + F(1, (q * qp) ** 2)
    assert sigma_f(MomentQuery(2.0, n, "exact")).value == total


# ---------------------------------------------------------------------------
# partition sums


def test_partition_everything_small_continuant():
    report = partition_sums(4, 2.0, PartitionParams(r=10, w=2), scheme="continuant")
    assert report.sums["large_continuant"] == 0
    assert report.parts_total() == report.whole


def test_partition_everything_dominant():
    report = partition_sums(4, 2.0, PartitionParams(r=10, w=4), scheme="continuant")
    assert report.sums["balanced"] == 0
    assert report.sums["dominant"] == sigma_q(MomentQuery(2.0, 4, "exact")).value


def test_partition_everything_large():
    # all continuants of the compositions of 4 are >= 4 = n^1
    report = partition_sums(4, 1.5, PartitionParams(r=1, w=2), scheme="continuant")
    assert report.sums["large_continuant"] == sigma_q(MomentQuery(1.5, 4, "exact")).value
    assert report.sums["dominant"] == 0 and report.sums["balanced"] == 0


@pytest.mark.parametrize("scheme", ["continuant", "interval"])
@pytest.mark.parametrize("n", [5, 8, 11])
def test_partition_counts_cover(scheme, n):
    report = partition_sums(n, 2.0, scheme=scheme)
    assert sum(report.counts.values()) == 2 ** (n - 2)


@pytest.mark.parametrize("beta,mode", [(2.0, "exact"), (3.0, "exact"), (1.25, "fast-float")])
@pytest.mark.parametrize("n", [6, 9, 12])
@pytest.mark.parametrize("r", [1.0, 1.5, 2.0])
def test_partition_completeness(beta, mode, n, r):
    for w in {1, max(1, n // 4), default_w(n)}:
        for scheme in ("continuant", "interval"):
            if mode == "exact" and scheme == "interval" and beta != int(beta):
                continue
            report = partition_sums(
                n, beta, PartitionParams(r=r, w=w), scheme=scheme, mode=mode
            )
            if mode == "exact":
                assert report.parts_total() == report.whole
            else:
                assert float(report.parts_total()) == pytest.approx(
                    float(report.whole), rel=1e-12
                )


def test_partition_interval_last_dominant_split():
    # n=8, w=3: dominant parts are 6, 7, 8
    report = partition_sums(8, 2.0, PartitionParams(r=10.0, w=3), scheme="interval")
    dominant_last = [
        c for c in canonical_compositions(8) if max(c) > 5 and c[-1] > max(c[:-1], default=0)
    ]
    assert report.counts["dominant_last"] == len(dominant_last)
    wide = sum(
        F(1, (neighbor_denominators(c).q * neighbor_denominators(c).q_minus) ** 2)
        for c in dominant_last
    )
    assert report.sums["dominant_last_wide"] == wide


def test_partition_validation():
    with pytest.raises(BetaRangeError):
        partition_sums(6, 1.0)
    with pytest.raises(ValueError):
        partition_sums(6, 2.0, PartitionParams(r=2.0, w=7))
    with pytest.raises(ValueError):
        partition_sums(6, 2.0, scheme="other")


def test_below_power_exact_edges():
    assert below_power(15, 4, 2.0)
    assert not below_power(16, 4, 2.0)
    assert below_power(7, 4, 1.5)
    assert not below_power(8, 4, 1.5)  # 4^1.5 = 8 exactly
    assert below_power(10, 10, 1.0000001)
    assert not below_power(11, 10, 1.0000001)


def test_default_parameters():
    assert default_w(4) == 1
    assert default_w(10) == 3
    assert default_w(30) == 13
    assert default_r(2.0, "continuant") == pytest.approx(3.0)
    assert default_r(2.0, "interval") == pytest.approx(3.5)
    with pytest.raises(BetaRangeError):
        default_r(1.0)


# ---------------------------------------------------------------------------
# identities and oracles


@pytest.mark.parametrize("n", [2, 3, 10, 16])
def test_adjacent_gap_sum_is_one(n):
    assert adjacent_gap_sum(n) == 1


@pytest.mark.parametrize("n", range(2, 11))
def test_adjacent_gap_sum_methods_agree(n):
    assert adjacent_gap_sum(n, "traverse") == adjacent_gap_sum(n, "enumerate") == 1


def test_adjacent_gap_sum_guard():
    with pytest.raises(GuardError):
        adjacent_gap_sum(23, "enumerate")


@pytest.mark.parametrize("n,w", [(6, 2), (8, 3), (5, 1), (9, 4), (14, 6)])
def test_decomposition_check(n, w):
    check = big_part_decomposition_check(n, w)
    assert check.passed
    assert check.direct_count == check.parametrized_count


def test_decomposition_singleton():
    check = big_part_decomposition_check(5, 1)
    assert check.direct_count == 1  # only (5,)


def test_decomposition_hypothesis_violated():
    with pytest.raises(ValueError):
        big_part_decomposition_check(6, 3)


def test_flank_moment_values():
    assert flank_moment_sum(6, 1, 2.0) == pytest.approx(1.0)
    # frozen from the enumeration oracle: (8,) and (1, 7) each weigh 1
    assert flank_moment_sum(8, 2, 2.0) == pytest.approx(2.0)
    assert flank_moment_sum(10, 2, 2.0) == flank_moment_sum(8, 2, 2.0)


def _flank_oracle(w, beta):
    # decomposition form: sum over prefix/suffix part sums u + v <= w - 1
    total = 0.0
    for u in range(w):
        for v in range(w - u):
            prefixes = list(all_compositions(u))
            suffixes = [()] if v == 0 else ([] if v == 1 else list(canonical_compositions(v)))
            for p in prefixes:
                for s in suffixes:
                    total += float(continuant(p) * continuant(s)) ** (-2 * beta)
    return total


@pytest.mark.parametrize("w", [1, 2, 3, 4, 5])
def test_flank_moment_matches_decomposition_oracle(w):
    n = 2 * w + 1
    assert flank_moment_sum(n, w, 2.0) == pytest.approx(_flank_oracle(w, 2.0), rel=1e-12)


@pytest.mark.parametrize("w", [2, 3])
def test_flank_moment_n_independent(w):
    values = {flank_moment_sum(n, w, 2.0) for n in range(2 * w + 1, 2 * w + 5)}
    assert len(values) == 1


def test_flank_moment_validation():
    with pytest.raises(ValueError):
        flank_moment_sum(6, 3, 2.0)
    with pytest.raises(BetaRangeError):
        flank_moment_sum(6, 1, 1.0)
    with pytest.raises(GuardError):
        flank_moment_sum(25, 2, 2.0)


# ---------------------------------------------------------------------------
# series coefficients


def test_binomial_series_coeff():
    assert binomial_series_coeff(4.0, 1) == pytest.approx(4.0)
    assert binomial_series_coeff(2.0, 2) == pytest.approx(3.0)
    assert binomial_series_coeff(1.7, 0) == 1.0
    for k in range(6):
        recur = binomial_series_coeff(2.5, k) * (2.5 + k) / (k + 1)
        assert binomial_series_coeff(2.5, k + 1) == pytest.approx(recur)


def test_last_wide_examples():
    assert truncated_coefficient("last_wide", 1, 2.0, 2).value == pytest.approx(0.375)
    expected = 0.375 + 4 * 2 * (1 / 81) * (8 / 3)
    assert truncated_coefficient("last_wide", 1, 2.0, 3).value == pytest.approx(expected)


def _gamma(beta, k):
    return binomial_series_coeff(beta, k)


def _oracle_last_wide(k, beta, v_max):
    total = 0.0
    for v in range(2, v_max + 1):
        for c in canonical_compositions(v):
            total += float(continuant(c)) ** (-2 * beta) * (v - float(reversed_cf_value(c))) ** k
    return 2 * _gamma(beta, k) * total


def _oracle_last_narrow(k, beta, v_max):
    total = 0.0
    for v in range(2, v_max + 1):
        for c in canonical_compositions(v):
            x = float(reversed_cf_value(c))
            weight = float(continuant(c)) ** (-2 * beta)
            poly = sum(
                _gamma(beta, l) * _gamma(beta, k - l) * (v - x) ** l * (v + 1 - x) ** (k - l)
                for l in range(k + 1)
            )
            total += weight * poly
    return 2 * total


def _suffixes(v):
    if v == 0:
        return [()]
    if v == 1:
        return []
    return list(canonical_compositions(v))


def _oracle_order(k, beta, v_max):
    total = 0.0
    for v in range(1, v_max + 1):
        for u in range(v + 1):
            for p in all_compositions(u):
                xp = float(reversed_cf_value(p))
                wp = float(continuant(p)) ** (-2 * beta)
                for s in _suffixes(v - u):
                    ys = float(cf_value(s))
                    ws = float(continuant(s)) ** (-2 * beta)
                    total += wp * ws * (v - xp - ys) ** k
    return _gamma(2 * beta, k) * total


def _oracle_inner(k, beta, v_max, narrow):
    total = 0.0
    for v in range(2, v_max + 1):
        for eta in range(2, v + 1):
            nu = v - eta
            for p in all_compositions(nu):
                xp = float(reversed_cf_value(p))
                wp = float(continuant(p)) ** (-2 * beta)
                for s in canonical_compositions(eta):
                    if narrow:
                        other = s[:-1] + (s[-1] - 1,)
                    else:
                        other = s[:-1]
                    y1 = float(cf_value(other))
                    y2 = float(cf_value(s))
                    ws = float(continuant(s) * continuant(other)) ** (-beta)
                    poly = sum(
                        _gamma(beta, l)
                        * _gamma(beta, k - l)
                        * (v - xp - y1) ** l
                        * (v - xp - y2) ** (k - l)
                        for l in range(k + 1)
                    )
                    total += wp * ws * poly
    return total


@pytest.mark.parametrize("k,beta", [(0, 2.0), (1, 2.0), (2, 2.0), (1, 1.25)])
def test_last_wide_against_oracle(k, beta):
    got = truncated_coefficient("last_wide", k, beta, 8).value
    assert got == pytest.approx(_oracle_last_wide(k, beta, 8), rel=1e-12)


@pytest.mark.parametrize("k,beta", [(0, 2.0), (1, 2.0), (2, 2.0)])
def test_last_narrow_against_oracle(k, beta):
    got = truncated_coefficient("last_narrow", k, beta, 8).value
    assert got == pytest.approx(_oracle_last_narrow(k, beta, 8), rel=1e-12)


@pytest.mark.parametrize("k,beta", [(0, 2.0), (1, 2.0), (1, 3.0)])
def test_order_against_oracle(k, beta):
    got = truncated_coefficient("order", k, beta, 7).value
    assert got == pytest.approx(_oracle_order(k, beta, 7), rel=1e-12)


@pytest.mark.parametrize("k,beta", [(0, 3.5), (1, 3.5)])
def test_inner_wide_against_oracle(k, beta):
    got = truncated_coefficient("inner_wide", k, beta, 7).value
    assert got == pytest.approx(_oracle_inner(k, beta, 7, narrow=False), rel=1e-12)


@pytest.mark.parametrize("k,beta", [(0, 2.0), (1, 2.0), (1, 3.0)])
def test_inner_narrow_against_oracle(k, beta):
    got = truncated_coefficient("inner_narrow", k, beta, 7).value
    assert got == pytest.approx(_oracle_inner(k, beta, 7, narrow=True), rel=1e-12)


@pytest.mark.parametrize(
    "kind,k,beta",
    [
        ("last_wide", 1, 2.0),
        ("last_narrow", 1, 2.0),
        ("order", 1, 2.0),
        ("inner_wide", 0, 3.5),
        ("inner_narrow", 0, 2.0),
    ],
)
def test_coefficients_positive_and_monotone(kind, k, beta):
    values = [truncated_coefficient(kind, k, beta, v).value for v in range(2, 9)]
    assert values[0] >= 0
    assert all(b >= a for a, b in zip(values, values[1:]))
    assert values[-1] > 0
    tail = truncated_coefficient(kind, k, beta, 8).tail_estimate
    assert tail > 0


def test_coefficient_convergence_guards():
    with pytest.raises(ValueError):
        truncated_coefficient("last_wide", 3, 2.0, 6)  # needs k < 2b-1 = 3
    with pytest.raises(ValueError):
        truncated_coefficient("order", 2, 2.0, 6)  # needs k < 2b-2 = 2
    with pytest.raises(ValueError):
        truncated_coefficient("inner_wide", 1, 2.0, 6)  # needs k < b-2 = 0
    with pytest.raises(GuardError):
        truncated_coefficient("last_wide", 1, 2.0, 27)
    with pytest.raises(BetaRangeError):
        truncated_coefficient("last_wide", 0, 1.0, 6)
    with pytest.raises(ValueError):
        truncated_coefficient("mystery", 0, 2.0, 6)


def test_inner_narrow_disputed_flag():
    assert truncated_coefficient("inner_narrow", 1, 2.0, 6).disputed
    assert not truncated_coefficient("inner_narrow", 0, 3.0, 6).disputed


# ---------------------------------------------------------------------------
# bound suites


def test_bounds_example_values():
    report = bounds_report(4, 2.0, PartitionParams(r=1.0, w=default_w(4)))
    by_name = {c.name: c for c in report.hard_checks}
    large = by_name["large-continuant-moment"]
    assert large.lhs == pytest.approx(2 / 256 + 2 / 625)
    assert large.bound == pytest.approx(0.125)
    assert large.passed
    interval = by_name["large-continuant-interval-moment"]
    assert interval.bound == pytest.approx(0.25)
    assert interval.passed
    assert report.passed


def test_bounds_depth_bound():
    report = bounds_report(4, 2.0, PartitionParams(r=2.0, w=1))
    depth = {c.name: c for c in report.hard_checks}["depth-within-cutoff"]
    assert depth.lhs == 3.0  # composition (1, 1, 2)
    assert depth.bound == pytest.approx(5.76168, abs=1e-4)


@pytest.mark.parametrize("beta", [1.25, 2.0, 3.0])
@pytest.mark.parametrize("r", [1.0, 2.0])
def test_bounds_hold_small_grid(beta, r):
    for n in range(4, 11):
        report = bounds_report(n, beta, PartitionParams(r=r, w=default_w(n)))
        assert report.passed, (n, beta, r, report.hard_checks)
        assert set(report.soft_ratios) == {
            "balanced-continuant-ratio",
            "balanced-interval-ratio",
        }
        assert all(v >= 0 for v in report.soft_ratios.values())


def test_bounds_guard():
    with pytest.raises(GuardError):
        bounds_report(23, 2.0)
