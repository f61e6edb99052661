import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drinlog.deformation import (
    ShadowedPartition,
    b_record,
    b_series_direct,
    b_series_recursive,
    deformation_series,
    enumerate_P_r_n,
    frobenius_inverse_phi_j,
    specialize_log,
)
from drinlog.drinfeld_core import DrinfeldModule, log_coeffs
from drinlog.tate_series import RationalTate


def brute_force_partitions(r, n):
    """Assign every x in {0..n-1} a label in {0 (unused), 1..r} and keep tilings."""
    found = set()
    for labels in itertools.product(range(r + 1), repeat=n):
        sets = tuple(frozenset(x for x in range(n) if labels[x] == i) for i in range(1, r + 1))
        cells = [x + j for i, S in enumerate(sets, start=1) for x in S for j in range(i)]
        if sorted(cells) == list(range(n)):
            found.add(sets)
    return found


@pytest.mark.parametrize("r,n", [(1, 4), (2, 6), (3, 7), (4, 6)])
def test_enumeration_matches_brute_force(r, n):
    got = {P.sets for P in enumerate_P_r_n(r, n)}
    assert got == brute_force_partitions(r, n)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 9))
def test_enumeration_is_sorted_and_tiles(r, n):
    parts = enumerate_P_r_n(r, n)
    assert all(P.covers(n) for P in parts)
    keys = [P.membership(n) for P in parts]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)


def test_partition_rejects_bad_arguments():
    with pytest.raises(ValueError):
        enumerate_P_r_n(0, 3)


def test_overlapping_sets_do_not_cover():
    P = ShadowedPartition((frozenset({0, 1}), frozenset({0})))
    assert not P.covers(3)


def test_carlitz_b_closed_form(carlitz2):
    W = carlitz2.W
    for n in range(1, 6):
        assert b_series_direct(carlitz2, n).equals(RationalTate(W, [W.one()], range(1, n + 1)))


def test_direct_matches_recursive(rank2):
    for n in range(7):
        assert b_series_direct(rank2, n).equals(b_series_recursive(rank2, n))


def test_b_at_theta_is_log_coefficient(rank2):
    Q = log_coeffs(rank2, 6).coeffs
    for n in range(7):
        assert (b_series_direct(rank2, n).eval_at_theta() - Q[n]).is_zero()


def test_series_methods_agree_and_specialize_to_log(rank2):
    W = rank2.W
    xi = W.theta**-2
    direct = deformation_series(rank2, xi, None, 40, "direct", prec=40)
    matrix = deformation_series(rank2, xi, None, 40, "matrix", prec=40)
    assert all(c.is_zero() for c in (direct - matrix).coeffs)
    value = specialize_log(rank2, xi, None, 40, 40)
    assert (value - log_coeffs(rank2, 10).evaluate(xi, 90)).is_zero()


def test_large_xi_keeps_precision(carlitz2):
    W = carlitz2.W
    xi = W.theta
    value = specialize_log(carlitz2, xi, None, 40, 64)
    assert (value - log_coeffs(carlitz2, 10).evaluate(xi, 90)).is_zero()


def test_zero_input(rank2):
    series = deformation_series(rank2, rank2.W.zero(), None, 10, prec=20)
    assert series.is_zero()


def test_phi_j(rank2):
    W = rank2.W
    xi = W.parse("theta^-2 + theta^-3")
    Q = log_coeffs(rank2, 4).coeffs
    for j in range(5):
        assert (frobenius_inverse_phi_j(rank2, xi, j) - Q[j] * xi.twist(j)).is_zero()


def test_unknown_method(rank2):
    with pytest.raises(ValueError):
        deformation_series(rank2, rank2.W.theta**-2, 3, 10, "bogus", prec=10)


def test_b_record_counts(rank2):
    rec = b_record(rank2, 3)
    assert rec["partitions_count"] == 3
    assert len(rec["partitions"]) == 3
