from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drinlog.errors import NotAPowerError, PrecisionError, RamificationError, ResidueTooSmallError
from drinlog.local_field import Norm, WElem, WorkingField, root_q_minus_1

FIELD_ARGS = [(2, 1, 1, 1), (2, 1, 2, 2), (3, 1, 2, 2), (5, 1, 1, 1)]


def field_of(args):
    return WorkingField.build(*args)


def term_dicts(W, low=-6, high=12):
    code = st.integers(0, W.F.size - 1)
    return st.dictionaries(st.integers(low, high), code, min_size=1, max_size=8)


def naive_mul(F, a: dict, b: dict) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            out[i + j] = F.add(out.get(i + j, 0), F.mul(x, y))
    return {k: v for k, v in out.items() if v}


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_exact_multiplication_matches_naive(data):
    W = field_of(data.draw(st.sampled_from(FIELD_ARGS)))
    a = data.draw(term_dicts(W))
    b = data.draw(term_dicts(W))
    got = (W.from_terms(a) * W.from_terms(b)).terms()
    assert got == naive_mul(W.F, {k: v for k, v in a.items() if v}, {k: v for k, v in b.items() if v})


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_inverse_times_self_is_one(data):
    W = field_of(data.draw(st.sampled_from(FIELD_ARGS)))
    a = W.from_terms(data.draw(term_dicts(W)))
    if a.is_zero():
        with pytest.raises(PrecisionError):
            a.inverse(40)
        return
    prod = a * a.inverse(40)
    assert (prod - W.one()).is_zero()
    diff = prod - W.one()
    assert diff.prec is None or diff.prec >= 40  # monomials invert exactly


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_twist_is_power_and_negative_twist_inverts(data):
    W = field_of(data.draw(st.sampled_from(FIELD_ARGS)))
    a = W.from_terms(data.draw(term_dicts(W, -3, 5)))
    n = data.draw(st.integers(1, 2))
    twisted = a.twist(n)
    assert (twisted - a ** (W.q**n)).is_zero()
    assert (twisted.twist(-n) - a).is_zero()


def test_negative_twist_of_non_power_raises():
    W = field_of((2, 1, 1, 1))
    with pytest.raises(NotAPowerError):
        W.u(1).twist(-1)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_root_q_minus_1(data):
    W = field_of(data.draw(st.sampled_from([(3, 1, 2, 2), (5, 1, 1, 1)])))
    n = W.q - 1
    terms = data.draw(term_dicts(W, 0, 10))
    a = W.from_terms(terms)
    if a.is_zero():
        return
    a = a.shift(-a.v + n * data.draw(st.integers(-3, 3)))
    try:
        y = root_q_minus_1(a, rel_prec=60)
    except ResidueTooSmallError:
        assert not W.F.roots_of_unity_root(a.lead(), n)
        return
    assert (y**n - a).is_zero()


def test_root_q_minus_1_needs_divisible_valuation():
    W = field_of((3, 1, 2, 2))
    with pytest.raises(RamificationError):
        root_q_minus_1(W.u(1))


def test_parse_and_theta_digits_round_trip():
    W = WorkingField.preset("q2-wide")
    x = W.parse("theta^3 + theta + 1/theta")
    digits, rem, ok = W.theta_digits(x, 20)
    assert ok and digits == {3: 1, 1: 1, -1: 1}
    assert rem.is_zero()


def test_parse_rejects_garbage():
    W = field_of((2, 1, 1, 1))
    with pytest.raises(ValueError):
        W.parse("theta^^2")
    with pytest.raises(ValueError):
        W.parse("x + 1")


def test_theta_digits_flags_non_kinfty_digit():
    W = field_of((2, 1, 2, 2))
    _, _, ok = W.theta_digits(W.u(-1), 10)
    assert not ok


def test_norm_of_theta_power():
    W = WorkingField.preset("q3")
    x = W.theta**5
    assert Norm.of(x).log_q == Fraction(5)
    assert Norm.of(W.zero(12)).bound
    assert Norm.of(W.zero(12)).log_q == Fraction(-6)


def test_precision_propagates_through_sum():
    W = field_of((2, 1, 1, 1))
    a = W.one().truncate(10)
    b = W.u(3)
    assert (a + b).prec == 10
    assert (a * W.u(-4)).prec == 6


def test_serialisation_round_trip():
    W = WorkingField.preset("q3")
    x = W.parse("theta^2 - 1/theta").truncate(30)
    y = WElem.from_dict(W, x.to_dict())
    assert y.same_as(x)
