import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptcobordism.errors import NoFit
from ptcobordism.qseries import (
    CoeffSeries,
    RationalFn,
    assemble,
    check_common_poles,
    check_functional_equation,
    fit_rational,
    fit_record,
    pgcd,
    pmul,
)

A1 = RationalFn.from_factors(9, 1, [1, 4, 30, 4, 1], plus=4)
A2 = RationalFn.from_factors(3, 1, [1, 4, 42, 4, 1], plus=4)


def test_canonical_form():
    r = RationalFn([0, 2, 2], [2, 4, 2])  # 2q(1+q) / 2(1+q)^2
    assert r == RationalFn([0, 1], [1, 1])
    assert r.den[0] == 1


def test_series_expansion():
    assert A1.series(1, 5) == [9, 0, 216, -864, 2160]
    assert RationalFn([1], [0, 1]).series(-1, 2) == [1, 0]  # 1/q


def test_assemble(p1xp2):
    s = assemble(p1xp2, (1, 0), (2,), 5)
    assert list(s.coeffs) == [9, 0, 216, -864, 2160]
    assert s.d == 2
    assert s.coefficient(0) == 0
    assert assemble(p1xp2, (1, 0), (0, 1), 0).coeffs == ()


def test_fit_known_function():
    s = CoeffSeries(1, tuple(A1.series(1, 12)))
    assert fit_rational(s) == A1
    assert fit_rational(s, mode="ansatz") == A1


def test_geometric_series():
    assert fit_rational([1] * 8, n_min=0) == RationalFn([1], [1, -1])


def test_negative_control():
    # 2^(n^2) grows too fast for any rational function with small denominator
    data = [Fraction(2) ** (n * n) for n in range(12)]
    with pytest.raises(NoFit):
        fit_rational(data, n_min=0, max_den_degree=3)
    with pytest.raises(NoFit):
        fit_rational(data, n_min=0, mode="ansatz")


def test_holdout_is_enforced():
    with pytest.raises(ValueError):
        fit_rational([1, 2, 3], holdout=1)
    # exactly enough data to interpolate but not to verify
    with pytest.raises(NoFit):
        fit_rational([1, 2], holdout=2)


def test_functional_equation():
    assert check_functional_equation(A1, 2)
    assert check_functional_equation(RationalFn([0, 1], [1, 2, 1]), 0)
    res = check_functional_equation(RationalFn([0, 1], [1, -2]), 0)
    assert not res.holds and res.residual


def test_common_poles():
    rep = check_common_poles([A1, A2])
    assert rep.same_support and rep.same_multiplicities
    assert rep.rational_poles == [{"-1": 4}, {"-1": 4}]
    assert not check_common_poles([RationalFn([1], [1, 1]), RationalFn([1], [1, -1])])


def test_irreducible_quadratic_pole():
    r = RationalFn([1], [1, 0, 1])
    rep = check_common_poles([r, RationalFn([0, 1], [1, 0, 1])])
    assert rep.same_support
    assert rep.rational_poles == [{}, {}]


def test_fit_record_shape(p1xp2):
    s = assemble(p1xp2, (1, 0), (2,), 12)
    rec = fit_record(s, fit_rational(s), 2)
    assert rec["functional_equation"] is True
    assert set(rec) >= {"geometry", "beta", "I", "d", "coefficients", "fit", "holdout"}


small_poly = st.lists(st.integers(-5, 5), min_size=1, max_size=4).filter(lambda p: any(p))


@settings(max_examples=40, deadline=None)
@given(small_poly, st.integers(0, 3), st.integers(0, 2), st.integers(1, 3))
def test_fit_roundtrip(num, plus, minus, shift):
    R = RationalFn.from_factors(1, shift, num, plus, minus)
    k = len(R.num) + len(R.den) + 4
    data = R.series(1, k)
    fitted = fit_rational(data, n_min=1)
    assert fitted.series(1, k) == data
    assert fitted == R


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=2, max_size=4), st.lists(st.integers(-3, 3), min_size=2, max_size=4))
def test_gcd_divides(a, b):
    a = tuple(Fraction(x) for x in a)
    b = tuple(Fraction(x) for x in b)
    if not any(a) or not any(b):
        return
    g = pgcd(a, b)
    assert g and g[-1] == 1
    assert pgcd(pmul(a, g), g) == g


def test_pade_finds_non_ansatz_pole():
    rng = random.Random(3)
    R = RationalFn([0, rng.randint(1, 5), 1], [1, -3, 1])  # poles off q = +-1
    data = R.series(1, 10)
    assert fit_rational(data, n_min=1) == R
