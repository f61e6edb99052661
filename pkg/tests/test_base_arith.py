import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drinlog.base_arith import CoeffPoly, FieldConfig, residue_artin_schreier, residue_field
from drinlog.errors import FieldError

FIELDS = [(2, 1, 1), (2, 1, 2), (3, 1, 2), (2, 2, 1), (3, 1, 3), (5, 1, 1)]


@pytest.fixture(params=FIELDS, ids=lambda f: "p{}m{}s{}".format(*f))
def F(request):
    return residue_field(*request.param)


def test_field_axioms_exhaustive(F):
    n = F.size
    elems = range(n)
    for a in elems:
        assert F.add(a, F.neg(a)) == 0
        if a:
            assert F.mul(a, F.inv(a)) == 1
    for a, b, c in itertools.islice(itertools.product(elems, repeat=3), 4000):
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))


def test_frobenius_is_additive_and_fixes_exactly_fq(F):
    fixed = [a for a in range(F.size) if F.frob(a) == a]
    assert len(fixed) == F.q
    assert sorted(fixed) == sorted(F.fq_codes)
    for a in range(F.size):
        for b in range(0, F.size, max(1, F.size // 7)):
            assert F.frob(F.add(a, b)) == F.add(F.frob(a), F.frob(b))
        assert F.frob(a) == F.pow(a, F.q)


def test_multiplicative_group_is_cyclic(F):
    orders = set()
    for a in range(1, F.size):
        k, x = 1, a
        while x != 1:
            x = F.mul(x, a)
            k += 1
        orders.add(k)
    assert max(orders) == F.size - 1


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_convolution_matches_schoolbook(data):
    F = residue_field(*data.draw(st.sampled_from(FIELDS)))
    codes = st.integers(0, F.size - 1)
    a = data.draw(st.lists(codes, min_size=1, max_size=30))
    b = data.draw(st.lists(codes, min_size=1, max_size=30))
    naive = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            naive[i + j] = F.add(naive[i + j], F.mul(x, y))
    got = F.convolve(np.array(a, dtype=np.int64), np.array(b, dtype=np.int64))
    assert list(got) == naive


def test_residue_artin_schreier_least_root_brute_force(F):
    q = F.q
    for a in range(F.size):
        for c in range(0, F.size, max(1, F.size // 5)):
            roots = [y for y in range(F.size) if F.add(F.pow(y, q), F.mul(a, y)) == c]
            assert residue_artin_schreier(F, a, c) == (min(roots) if roots else None)


def test_roots_of_unity_root(F):
    for a in range(1, F.size):
        for y in F.roots_of_unity_root(a, F.q - 1):
            assert F.pow(y, F.q - 1) == a


def test_config_text_round_trip():
    cfg = FieldConfig.build(3, 1, 2)
    assert FieldConfig.from_text(cfg.to_text()) == cfg


def test_coeff_poly_rejects_non_fq_coefficients():
    F = residue_field(2, 1, 2)
    non_fq = next(c for c in range(F.size) if not F.in_fq(c))
    with pytest.raises(FieldError):
        CoeffPoly(F, (1, non_fq))


def test_coeff_poly_ring_ops():
    F = residue_field(3, 1, 1)
    a = CoeffPoly(F, (1, 1))  # 1 + t
    b = CoeffPoly(F, (2, 1))  # -1 + t
    assert (a * b).coeffs == (2, 0, 1)
    assert (a - a).is_zero()
    assert str(CoeffPoly(F, (0, 1, 1))) == "t^2 + t"
