import pytest

from conftest import geometry_and_class
from ptcobordism.deg1engine import enumerate_deg1, tvir_character_deg1
from ptcobordism.errors import NonIsolatedFixedLocus
from ptcobordism.ptvertex import (
    EdgeAssignment,
    Leg,
    chi_curve,
    edge_assignments,
    enumerate_general,
    general_character,
    partitions,
    vertex_boxes,
)
from ptcobordism.toric3 import load_and_validate

DEG1 = [("p3", "line"), ("p1xp2", "fiber"), ("p1xp2", "line"), ("p1p1p1", "e1"), ("p1p1p1", "e3")]


def _chars(chars):
    return sorted(tuple(sorted(c.items())) for c in chars)


def test_partitions():
    assert partitions(3) == ((3,), (2, 1), (1, 1, 1))
    assert len(partitions(6)) == 11


@pytest.mark.parametrize("geo,cls", DEG1)
@pytest.mark.parametrize("n", [1, 2, 4, 7])
def test_agrees_with_deg1(geo, cls, n):
    X, beta = geometry_and_class(geo, cls)
    general = enumerate_general(X, beta, n)
    deg1 = enumerate_deg1(X, beta, n)
    assert len(general) == len(deg1)
    expected = _chars(tvir_character_deg1(p) for p in deg1)
    assert _chars(general_character(p, "vertex") for p in general) == expected
    assert _chars(general_character(p) for p in general) == expected


def test_disjoint_product_rule(p1p1p1):
    pairs = enumerate_general(p1p1p1, (1, 1, 0), 2)
    disjoint = [p for p in pairs if p.deg1_components() is not None]
    assert len(disjoint) == 8  # one per disjoint edge pair
    for p in disjoint:
        prod = general_character(p, "product")
        assert prod == general_character(p, "vertex")
        assert prod == sum((tvir_character_deg1(c) for c in p.deg1_components()), type(prod).zero())


def test_below_minimum(p1xp2):
    assert enumerate_general(p1xp2, (2, 0), 1) == []


def test_nodal_curve(p1p1p1):
    nodal = [a for a in edge_assignments(p1p1p1, (1, 1, 0)) if len({v for i, _ in a.parts for v in p1p1p1.edges[i].endpoints()}) == 3]
    assert len(nodal) == 8
    assert all(chi_curve(p1p1p1, a) == 1 for a in nodal)


def test_fat_line_euler_characteristic(p1xp2):
    fat = [a for a in edge_assignments(p1xp2, (2, 0)) if len(a.parts) == 1]
    assert len(fat) == 6
    assert all(chi_curve(p1xp2, a) == 2 for a in fat)


@pytest.mark.parametrize("geo,cls", [("p1xp2", "2*fiber"), ("p1p1p1", "e1+e2")])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_rank_and_isolation(geo, cls, n):
    X, beta = geometry_and_class(geo, cls)
    for p in enumerate_general(X, beta, n):
        char = general_character(p)  # raises on a zero weight or a rank mismatch
        assert char.rank() == 4


def test_triple_leg_is_refused():
    cell = frozenset({(0, 0, 0)})
    legs = (Leg(0, cell), Leg(1, cell), Leg(2, cell))
    with pytest.raises(NonIsolatedFixedLocus):
        vertex_boxes(legs, 1)
    vertex_boxes(legs, 0)


def test_nodal_vertex_boxes():
    cell = frozenset({(0, 0, 0)})
    vb = vertex_boxes((Leg(0, cell), Leg(1, cell)), 3)
    levels = vb.enumerate(3)
    # the node box is free; every negative box needs it
    assert [len(l) for l in levels] == [1, 1, 2, 3]


def test_edge_assignment_class(p1xp2):
    for a in edge_assignments(p1xp2, (2, 0)):
        assert isinstance(a, EdgeAssignment)
        assert a.curve_class(p1xp2) == (2, 0)
