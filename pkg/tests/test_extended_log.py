import pytest

from drinlog.base_arith import CoeffPoly
from drinlog.difference_eq import BranchPolicy, omega_series, psi_rank1
from drinlog.drinfeld_core import DrinfeldModule, exp_coeffs, log_coeffs
from drinlog.errors import DimensionError
from drinlog.extended_log import (
    LatticeBasis,
    carlitz_kinfty_branch,
    exp_from_lattice_product,
    ext_LE,
    ext_log,
    lattice_membership,
    period_lattice_from_psi,
    verify_functional_equation,
    verify_inside_radius,
    verify_inverse_of_exp,
)
from drinlog.local_field import Norm, WorkingField
from drinlog.tate_series import TateElem

PREC = 40


@pytest.fixture(scope="module")
def setup():
    W = WorkingField.preset("q2-wide")
    C = DrinfeldModule.carlitz(W)
    Psi = psi_rank1(C, 64, PREC + 20)
    lattice = period_lattice_from_psi(C, Psi, prec=PREC)
    return W, C, Psi, lattice


def test_period_has_expected_size_and_is_killed_by_exp(setup):
    W, C, Psi, lattice = setup
    (pi,) = lattice.generators
    assert Norm.of(pi).log_q == 2  # q^(q/(q-1)) for q = 2
    assert Norm.of(exp_coeffs(C, 12).evaluate(pi, (PREC + 4) * W.e)).at_most_exponent(-PREC)


def test_membership_examples(setup):
    W, C, Psi, lattice = setup
    (pi,) = lattice.generators
    assert lattice_membership(W.zero(), lattice, PREC).member
    mem = lattice_membership((W.theta**2 + W.one()) * pi, lattice, PREC)
    assert mem.member
    assert mem.witness[0] == CoeffPoly(W.F, (1, 0, 1), "theta")
    assert not lattice_membership(pi * W.theta.inverse(), lattice, PREC).member
    assert not lattice_membership(W.one(), lattice, PREC).member


def test_zero_input(setup):
    W, C, Psi, lattice = setup
    assert ext_LE(C, Psi, TateElem.zero(W, Psi.D), prec=PREC).is_zero()
    assert ext_log(C, Psi, W.zero(), prec=PREC).representative.is_zero()
    assert verify_inside_radius(C, Psi, W.zero(), prec=PREC, lattice=lattice).passed
    assert verify_functional_equation(C, Psi, W.zero(), prec=PREC, lattice=lattice).passed


def test_branches_differ_by_a_period(setup):
    W, C, Psi, lattice = setup
    xi = W.theta**3
    a = ext_log(C, Psi, xi, BranchPolicy.least(), PREC).representative
    b = ext_log(C, Psi, xi, BranchPolicy.kinfty(Psi.entries[0][0].coeffs[0]), PREC).representative
    assert lattice_membership(a - b, lattice, PREC).member


def test_additivity_mod_lattice(setup):
    W, C, Psi, lattice = setup
    x1, x2 = W.theta**3, W.parse("theta^2 + theta^-1")
    lhs = ext_log(C, Psi, x1 + x2, prec=PREC).representative
    rhs = ext_log(C, Psi, x1, prec=PREC).representative + ext_log(C, Psi, x2, prec=PREC).representative
    assert lattice_membership(lhs - rhs, lattice, PREC).member


def test_local_analyticity(setup):
    W, C, Psi, lattice = setup
    base, delta = W.theta**3, W.parse("theta^-1 + theta^-4")
    diff = ext_log(C, Psi, base + delta, prec=PREC).representative - ext_log(C, Psi, base, prec=PREC).representative
    direct = log_coeffs(C, 10).evaluate(delta, (PREC + 6) * W.e)
    assert lattice_membership(diff - direct, lattice, PREC).member


def test_inverse_of_exp_at_a_period(setup):
    W, C, Psi, lattice = setup
    (pi,) = lattice.generators
    report = verify_inverse_of_exp(C, Psi, pi, prec=PREC, lattice=lattice)
    assert report.passed
    assert report.to_dict()["pass"] is True


def test_kinfty_branch_matches_log_inside_radius(W2, carlitz2):
    omega = omega_series(W2, 64, 50)
    assert carlitz_kinfty_branch(W2.zero(), 64, PREC, omega=omega).is_zero()
    alpha = W2.parse("theta + 1 + theta^-3")
    steps = []
    value = carlitz_kinfty_branch(alpha, 64, PREC, trace=steps, omega=omega)
    assert steps and all(s["edge"] == "linear" for s in steps)
    assert (value - log_coeffs(carlitz2, 9).evaluate(alpha, 50)).is_zero()


def test_kinfty_branch_outside_radius_round_trips(setup):
    W, C, Psi, lattice = setup
    alpha = W.theta**3
    value = carlitz_kinfty_branch(alpha, 64, PREC)
    back = exp_coeffs(C, 12).evaluate(value, (PREC + 2) * W.e)
    assert Norm.of(back - alpha).at_most_exponent(-PREC)


def test_lattice_product(W2, carlitz2):
    Psi = psi_rank1(carlitz2, 64, 60)
    lattice = period_lattice_from_psi(carlitz2, Psi, prec=40)
    (pi,) = lattice.generators
    assert exp_from_lattice_product(lattice, W2.zero(), 4, 20).is_zero()
    assert exp_from_lattice_product(lattice, pi, 3, 20).is_zero()
    z = W2.parse("1 + theta^-2")
    gap = exp_from_lattice_product(lattice, z, 6, 20) - exp_coeffs(carlitz2, 12).evaluate(z, 60)
    assert Norm.of(gap).at_most_exponent(-20)


def test_lattice_product_needs_rank_one(W2):
    lattice = LatticeBasis(W2, [W2.theta, W2.theta**2], 10)
    with pytest.raises(DimensionError):
        exp_from_lattice_product(lattice, W2.one())


def test_rank_two_greedy_membership(W2):
    a, b = W2.parse("theta^3 + 1"), W2.parse("theta^-1 + theta^2")
    lattice = LatticeBasis(W2, [a, b], 40)
    mem = lattice_membership(W2.theta * a + b, lattice, 30)
    assert mem.member
    assert not lattice_membership(W2.parse("theta^-5"), lattice, 30).member
