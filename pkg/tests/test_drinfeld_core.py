from fractions import Fraction

import pytest

from drinlog.base_arith import CoeffPoly
from drinlog.drinfeld_core import (
    DrinfeldModule,
    SigmaPoly,
    SkewPoly,
    apply_skew,
    epsilon0,
    epsilon1,
    exp_coeffs,
    frame_products,
    log_coeffs,
    phi_E_inverse,
    phi_E_rational,
    phi_of,
    radius_estimate,
    t_action,
)
from drinlog.errors import DimensionError, NotAPowerError
from drinlog.local_field import WorkingField


def carlitz_exp_oracle(W, i):
    """1 / prod_{j<i} (theta^(q^i) - theta^(q^j))."""
    den = W.one()
    for j in range(i):
        den = den * (W.theta.twist(i) - W.theta.twist(j))
    return den.inverse(150)


def carlitz_log_oracle(W, i):
    """1 / prod_{j=1..i} (theta - theta^(q^j))."""
    den = W.one()
    for j in range(1, i + 1):
        den = den * (W.theta - W.theta.twist(j))
    return den.inverse(150)


@pytest.mark.parametrize("preset", ["q2", "q3"])
def test_carlitz_coefficients_match_closed_forms(preset):
    W = WorkingField.preset(preset)
    C = DrinfeldModule.carlitz(W)
    ex, lg = exp_coeffs(C, 5, 150), log_coeffs(C, 5, 150)
    for i in range(6):
        assert (ex.coeffs[i] - carlitz_exp_oracle(W, i)).is_zero()
        assert (lg.coeffs[i] - carlitz_log_oracle(W, i)).is_zero()


def test_exp_functional_equation(rank2):
    W = rank2.W
    z = W.parse("theta^-3 + theta^-5")
    ex = exp_coeffs(rank2, 8)
    lhs = ex.evaluate(W.theta * z, 120)
    rhs = apply_skew(rank2.phi_t(), ex.evaluate(z, 160))
    assert (lhs - rhs).is_zero()


def test_compositions_are_identity(rank2):
    W = rank2.W
    ex, lg = exp_coeffs(rank2, 5), log_coeffs(rank2, 5)
    for comp in (ex.compose(lg), lg.compose(ex)):
        assert (comp.coeffs[0] - W.one()).is_zero()
        assert all(c.is_zero() for c in comp.coeffs[1:])


def test_phi_of_is_a_ring_map(rank2):
    W = rank2.W
    F = W.F
    t = CoeffPoly(F, (0, 1))
    one = CoeffPoly(F, (1,))
    phi_t = rank2.phi_t()
    assert phi_of(rank2, t * t).equals(phi_t * phi_t)
    assert phi_of(rank2, t + one).equals(phi_t + SkewPoly.constant(W.one()))


def test_skew_product_acts_by_composition(rank2):
    W = rank2.W
    f = rank2.phi_t()
    g = SkewPoly(W, [W.parse("theta^-1"), W.one()])
    z = W.parse("1 + theta^-2")
    assert (apply_skew(f * g, z) - apply_skew(f, apply_skew(g, z))).is_zero()


@pytest.mark.parametrize("preset", ["q2", "q3"])
def test_carlitz_radius(preset):
    W = WorkingField.preset(preset)
    est = radius_estimate(DrinfeldModule.carlitz(W), 8)
    assert est.log_q == Fraction(W.q, W.q - 1)
    assert est.stabilized


def test_frame_inverse(rank2):
    assert (phi_E_rational(rank2) @ phi_E_inverse(rank2)).is_identity()


def test_frame_products_recursion(rank2):
    R = frame_products(rank2, 3)
    assert R[0].is_identity()
    nxt = phi_E_inverse(rank2).twist(3) @ R[2]
    for i in range(2):
        for j in range(2):
            assert nxt.entry(i, j).equals(R[3].entry(i, j))


def test_kappa_root_reports_index(W2):
    E = DrinfeldModule(W2, [W2.theta, W2.theta])
    with pytest.raises(NotAPowerError, match="kappa_1"):
        E.kappa_root(1, 1)


def test_epsilon_maps_intertwine_t_action():
    # sigma twists coefficients backwards, so theta needs q-power roots: e = q^2
    W = WorkingField.build(2, 1, 1, e=4)
    E = DrinfeldModule(W, [W.theta**4, W.theta**8])
    m = SigmaPoly(W, [W.parse("theta^-1"), W.parse("1 + theta^-4")])
    acted = t_action(E, m)
    assert (epsilon1(acted) - apply_skew(E.phi_t(), epsilon1(m))).is_zero()
    assert (epsilon0(acted) - epsilon0(m) * W.theta).is_zero()


def test_sigma_degree_cap(W2):
    with pytest.raises(DimensionError):
        SigmaPoly(W2, [W2.one()] * 40)


def test_module_serialisation(rank2):
    again = DrinfeldModule.from_dict(rank2.W, rank2.to_dict())
    assert all((a - b).is_zero() for a, b in zip(again.kappa, rank2.kappa))
