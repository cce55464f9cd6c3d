from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptcobordism.descent import (
    CohClass,
    DescendentExpr,
    Tau,
    expr_from_terms,
    grr_expansion,
    grr_terms,
    kunneth_diagonal,
    parse_expr,
    reduce_generalized,
    todd_class,
)
from ptcobordism.errors import ParseError, UnsupportedSpace
from ptcobordism.toric3 import load_and_validate

GOLDEN = Path(__file__).parent / "golden"
GEOMETRIES = ["p3", "p1xp2", "p1p1p1"]


def _pairs(dims):
    return sorted((tuple(u.terms)[0], tuple(v.terms)[0]) for u, v in kunneth_diagonal(dims))


def test_diagonal_p1_p2():
    assert _pairs((1,)) == [((0,), (1,)), ((1,), (0,))]
    assert _pairs((2,)) == [((0,), (2,)), ((1,), (1,)), ((2,), (0,))]


def test_diagonal_product():
    pairs = _pairs((1, 2))
    assert len(pairs) == 6
    assert pairs == sorted((a + b, c + d) for a, c in _pairs((1,)) for b, d in _pairs((2,)))


@pytest.mark.parametrize("geo", GEOMETRIES)
def test_diagonal_degree(geo):
    X = load_and_validate(geo)
    for u, v in kunneth_diagonal(X):
        assert {a + b for a in u.degrees() for b in v.degrees()} == {6}


def test_diagonal_integrates_to_identity():
    # int_X (u_i v_j) = delta_ij characterizes the diagonal of P^n
    for dims in [(3,), (1, 2), (1, 1, 1)]:
        diag = kunneth_diagonal(dims)
        for i, (u, _) in enumerate(diag):
            for j, (_, v) in enumerate(diag):
                assert (u * v).integrate() == (1 if i == j else 0)


def test_todd_p3():
    assert todd_class((3,)) == CohClass((3,), {(0,): 1, (1,): 2, (2,): "11/6", (3,): 1})
    # int Td = chi(O) = 1
    for dims in [(3,), (1, 2), (1, 1, 1)]:
        assert todd_class(dims).integrate() == 1


def test_unsupported_space():
    with pytest.raises(UnsupportedSpace):
        kunneth_diagonal(())
    doc = load_and_validate("p3").to_json()
    doc["product_dims"] = None
    with pytest.raises(UnsupportedSpace):
        grr_expansion(load_and_validate(doc), 1)


@pytest.mark.parametrize("geo", GEOMETRIES)
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_grr_degree_constraint(geo, k):
    X = load_and_validate(geo)
    terms = grr_terms(X, k)
    assert terms
    assert all(t.real_degree() == 2 * k + 6 for t in terms)
    # no ch(O) term survives: every term carries at least one ch(F)
    assert all(t.i >= 2 for t in terms)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_grr_symmetry(k):
    terms = grr_terms((3,), k)
    quad = {(t.i, t.j, t.gamma): t.a for t in terms if t.j}
    for (i, j, g), a in quad.items():
        # swapping the factors picks up (-1)^(i+j) from the dual rule
        assert quad.get((j, i, g), 0) == a * (-1) ** (i + j)


def test_grr_golden_p3():
    lines = [l for l in (GOLDEN / "grr_p3_k1.txt").read_text().splitlines() if l and not l.startswith("#")]
    assert grr_expansion(load_and_validate("p3"), 1) == parse_expr("\n".join(lines), (3,))


def test_reduce_p1():
    e = expr_from_terms((1,), [(1, (Tau(0, 0, (0,)),))])
    assert reduce_generalized(e).to_text() == "2 * tau[0](1) * tau[0](h1)"


@pytest.mark.parametrize("geo", GEOMETRIES)
@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_reduction(geo, k):
    X = load_and_validate(geo)
    e = grr_expansion(X, k)
    r = reduce_generalized(e, X)
    assert not r.has_generalized()
    assert r.degrees() <= {2 * k}
    assert e.degrees() == {2 * k}


def test_reduction_without_generalized_terms_is_identity():
    e = expr_from_terms((3,), [(2, (Tau(1, None, (1,)),)), (-1, (Tau(0, None, (0,)), Tau(2, None, (2,))))])
    assert reduce_generalized(e) == e


@settings(max_examples=30, deadline=None)
@given(st.integers(-5, 5), st.integers(0, 3), st.integers(0, 3), st.integers(0, 3))
def test_linearity(a, i, j, g):
    dims = (1, 2)
    e1 = expr_from_terms(dims, [(1, (Tau(i, j, (0, g % 3)),))])
    e2 = expr_from_terms(dims, [(3, (Tau(j, i, (1, 0)),))])
    lhs = reduce_generalized(e1.scale(a) + e2)
    rhs = reduce_generalized(e1).scale(a) + reduce_generalized(e2)
    assert lhs == rhs


def test_printer_roundtrip():
    X = load_and_validate("p1p1p1")
    for k in (1, 2):
        for e in (grr_expansion(X, k), reduce_generalized(grr_expansion(X, k))):
            assert parse_expr(e.to_text(), (1, 1, 1)) == e


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_expr("1 * tau[0](q1)", (3,))
    with pytest.raises(ParseError):
        parse_expr("x * tau[0](1)", (3,))
    assert parse_expr("", (3,)) == DescendentExpr((3,))
