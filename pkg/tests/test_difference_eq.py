from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from drinlog.difference_eq import (
    BranchPolicy,
    L0_series,
    newton_polygon,
    omega_recursion_residuals,
    omega_series,
    psi_rank1,
    solve_artin_schreier,
    validate_psi,
    wp,
    wp_inverse,
)
from drinlog.drinfeld_core import DrinfeldModule
from drinlog.errors import NoIntegralSlopeError, NormNotContractingError
from drinlog.local_field import Norm, WorkingField
from drinlog.tate_series import TateElem, TateMat, gauss_norm

FIELDS = {name: WorkingField.preset(name) for name in ("q2", "q2-wide", "q3")}


def element(W, low, high):
    code = st.integers(0, W.F.size - 1)
    return st.dictionaries(st.integers(low, high), code, min_size=1, max_size=6).map(W.from_terms)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_artin_schreier_solver_finds_a_root(data):
    W = FIELDS[data.draw(st.sampled_from(sorted(FIELDS)))]
    a = data.draw(element(W, -4, 6))
    y = data.draw(element(W, -5, 8))
    assume(not a.is_zero())
    c = y.twist(1) + a * y
    root = solve_artin_schreier(a, c, BranchPolicy.least(), prec=20)
    residual = root.twist(1) + a * root - c
    assert Norm.of(residual).at_most_exponent(-20)


def brute_lower_hull(points):
    """Value of the lower convex hull at each integer abscissa."""
    xs = range(points[0][0], points[-1][0] + 1)
    out = {}
    for x in xs:
        best = None
        for (x1, y1) in points:
            for (x2, y2) in points:
                if x1 <= x <= x2 and x1 < x2:
                    val = Fraction(y1) + Fraction(y2 - y1, x2 - x1) * (x - x1)
                elif x1 == x2 == x:
                    val = Fraction(y1)
                else:
                    continue
                best = val if best is None else min(best, val)
        out[x] = best
    return out


@settings(max_examples=80, deadline=None)
@given(st.lists(st.one_of(st.none(), st.integers(-10, 10)), min_size=2, max_size=8))
def test_newton_polygon_matches_brute_force(vals):
    W = FIELDS["q2"]
    coeffs = [None if v is None else W.u(v) for v in vals]
    pts = [(i, v) for i, v in enumerate(vals) if v is not None]
    assume(len(pts) >= 1)
    poly = newton_polygon(coeffs)
    ref = brute_lower_hull(pts)
    x0 = pts[0][0]
    for edge in poly.edges:
        start = dict(pts)[edge["from"]]
        slope = Fraction(edge["slope"])
        for x in range(edge["from"], edge["to"] + 1):
            assert start + slope * (x - edge["from"]) == ref[x]
    covered = {x for e in poly.edges for x in range(e["from"], e["to"] + 1)} or {x0}
    assert covered == set(ref)


def test_linear_edge_trace():
    W = FIELDS["q2"]
    trace = []
    solve_artin_schreier(W.theta**2, W.theta**3 * W.u(3), trace=trace)
    assert trace and all(st["edge"] == "linear" and st["length"] == 1 for st in trace)


def test_non_integral_slope_is_reported():
    W = FIELDS["q2"]
    with pytest.raises(NoIntegralSlopeError):
        solve_artin_schreier(-W.one(), -W.theta)  # Y^2 - Y = theta


def test_simple_root():
    W = FIELDS["q2"]
    assert (solve_artin_schreier(-W.one(), W.theta - W.theta**2) - W.theta).is_zero()


def test_policy_validation():
    with pytest.raises(ValueError):
        BranchPolicy("sideways")


def series(W, rng_terms):
    return TateElem(W, [W.from_terms(t) for t in rng_terms])


@settings(max_examples=20, deadline=None)
@given(st.data())
def test_wp_inverse_round_trip(data):
    W = FIELDS["q2-wide"]
    g = TateElem(W, [data.draw(element(W, -5, 5)) for _ in range(4)])
    small = TateElem(W, [data.draw(element(W, 1, 8)) for _ in range(4)])
    h = wp(g) + small
    f = wp_inverse(h, BranchPolicy.least(), 15, theta_aware=False)
    assert all(c.is_zero() for c in (wp(f) - h).coeffs)


def test_l0_series_requires_contraction():
    W = FIELDS["q2"]
    with pytest.raises(NormNotContractingError):
        L0_series(TateElem(W, [W.one()]), 10)


def test_l0_agrees_with_wp_inverse_for_small_input():
    W = FIELDS["q2"]
    h = TateElem(W, [W.parse("theta^-1 + theta^-3"), W.parse("theta^-2")])
    gap = gauss_norm(L0_series(h, 30) - wp_inverse(h, BranchPolicy.least(), 30, theta_aware=False))
    assert gap.at_most_exponent(-30)


def test_row_vector_inputs():
    W = FIELDS["q2"]
    row = TateMat(W, [[TateElem(W, [W.parse("theta^-1")]), TateElem(W, [W.parse("theta^-2")])]])
    out = wp_inverse(row, prec=20)
    assert out.rows == 1 and out.cols == 2


@pytest.mark.parametrize("name", sorted(FIELDS))
def test_omega(name):
    W = FIELDS[name]
    q = W.q
    omega = omega_series(W, 20, 40)
    assert gauss_norm(omega).log_q == Fraction(-q, q - 1)
    assert all(r.is_zero() for r in omega_recursion_residuals(omega))
    # a_1 = -a_0 * sum_{k>=1} theta^(-q^k), from the product formula
    a0 = omega.coeffs[0]
    tail = W.zero()
    for k in range(1, 8):
        tail = tail + W.theta.twist(k).inverse(200)
    assert (omega.coeffs[1] + a0 * tail).is_zero()


def test_psi_for_twisted_module():
    W = FIELDS["q2"]
    gamma = W.one() + W.theta.twist(1).inverse()
    E = DrinfeldModule(W, [gamma ** (W.q - 1)])
    Psi = psi_rank1(E, 30, 40)
    assert validate_psi(E, Psi).at_most_exponent(-20)
