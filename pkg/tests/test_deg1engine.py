import pytest

from conftest import DEG1_CASES, geometry_and_class
from ptcobordism.deg1engine import enumerate_deg1, equivariant_chi, is_degree_one, tvir_character_deg1
from ptcobordism.errors import NotDegreeOne
from ptcobordism.exactalg import LaurentPoly, wscale


def test_fiber_single_point(p1xp2):
    pairs = enumerate_deg1(p1xp2, (1, 0), 1)
    assert len(pairs) == 3
    for pair in pairs:
        nu1, nu2 = pair.edge.nu
        assert tvir_character_deg1(pair) == LaurentPoly.monomial(nu1) + LaurentPoly.monomial(nu2)


@pytest.mark.parametrize("geo,cls,d", DEG1_CASES)
@pytest.mark.parametrize("n", [1, 2, 5])
def test_pair_count(geo, cls, d, n):
    X, beta = geometry_and_class(geo, cls)
    lines = sum(1 for e in X.edges if e.curve_class == beta)
    assert len(enumerate_deg1(X, beta, n)) == lines * n


def test_below_minimal_euler_characteristic(p3):
    assert enumerate_deg1(p3, (1,), 0) == []


def test_not_degree_one(p1xp2):
    assert not is_degree_one(p1xp2, (2, 0))
    with pytest.raises(NotDegreeOne):
        enumerate_deg1(p1xp2, (2, 0), 3)


@pytest.mark.parametrize("m", [-2, 0, 1, 3])
def test_equivariant_chi_rank(p3, m):
    edge = p3.edges[0]
    chi = equivariant_chi(edge, (0, 0, 0), m).normalize()
    assert chi.rank() == m + 1
    if m >= 0:
        expected = sum((LaurentPoly.monomial(wscale(k, edge.u0)) for k in range(m + 1)), LaurentPoly.zero())
        assert chi == expected


def test_character_is_reparametrization_invariant(p1xp2):
    # the same curve seen from the other end, with (a, b) swapped
    for pair in enumerate_deg1(p1xp2, (0, 1), 4):
        assert tvir_character_deg1(pair) == tvir_character_deg1(pair.swapped())


def test_weight_shift_of_sections(p3):
    # chi(L(p)) = chi(L) + fiber of L(p) at p
    edge = p3.edges[2]
    base = equivariant_chi(edge, (0, 0, 0), 1).normalize()
    twisted = equivariant_chi(edge, wscale(-1, edge.u0), 2).normalize()
    assert twisted - base == LaurentPoly.monomial(wscale(-1, edge.u0))
