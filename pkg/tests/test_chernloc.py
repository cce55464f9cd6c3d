from fractions import Fraction

import pytest

from conftest import DEG1_CASES, geometry_and_class
from ptcobordism.chernloc import (
    Specialization,
    bott_chern_numbers,
    character_to_chern_data,
    chern_indices,
    chern_number,
    chern_numbers,
    draw_specializations,
    index_degree,
    normalize_index,
    pair_contributions,
    parse_index,
)
from ptcobordism.errors import DegenerateSpecialization, EngineUnavailable, ZeroWeightPresent
from ptcobordism.exactalg import LaurentPoly
from ptcobordism.toric3 import load_and_validate


def test_index_listing():
    assert chern_indices(2) == [(2,), (0, 1)]
    assert chern_indices(4) == [(4,), (2, 1), (0, 2), (1, 0, 1), (0, 0, 0, 1)]
    assert len(chern_indices(6)) == 11
    assert all(index_degree(i) == 6 for i in chern_indices(6))


def test_index_parsing():
    assert parse_index("0,1,0") == (0, 1)
    assert normalize_index([2, 0, 0]) == (2,)


def test_spot_values(p1xp2):
    vals = [chern_number(p1xp2, (1, 0), n, (2,)) for n in range(1, 6)]
    assert vals == [9, 0, 216, -864, 2160]
    vals = [chern_number(p1xp2, (1, 0), n, (0, 1)) for n in range(1, 5)]
    assert vals == [3, 0, 108, -432]


def test_leading_p3_values(p3):
    assert chern_number(p3, (1,), 1, (4,)) == 512


@pytest.mark.parametrize("geo,cls,d", DEG1_CASES)
def test_seed_independence(geo, cls, d):
    X, beta = geometry_and_class(geo, cls)
    for n in (1, 3):
        a = chern_numbers(X, beta, n, seed=0)
        b = chern_numbers(X, beta, n, seed=12345, specializations=4)
        assert a == b
        assert all(Fraction(v).denominator == 1 for v in a.values())


def test_bott_numbers(p3, p1xp2, p1p1p1):
    assert bott_chern_numbers(p3) == {(3,): 64, (1, 1): 24, (0, 0, 1): 4}
    assert bott_chern_numbers(p1p1p1)[(0, 0, 1)] == 8
    assert bott_chern_numbers(p1xp2)[(0, 0, 1)] == 6


def test_zero_weight_rejected():
    with pytest.raises(ZeroWeightPresent):
        character_to_chern_data(LaurentPoly.one(), 1)


def test_symbolic_chern_data_matches_specialized():
    char = LaurentPoly({(1, 0, 0): 2, (0, 1, -1): 1, (1, 1, 0): -1})
    c, euler = character_to_chern_data(char, 2)
    spec = Specialization((3, 5, 11), 0)
    s = spec.s
    for idx in [(2,), (0, 1)]:
        lhs = pair_contributions(char, [idx], spec, 2)[0]
        num = Fraction(1)
        for k, i in enumerate(idx):
            num *= c[k].evaluate(s) ** i
        den = Fraction(1)
        for w, m in euler:
            den *= Fraction(spec.value(w)) ** m
        assert lhs == num / den


def test_specializations_are_generic():
    ws = [(1, 0, 0), (0, 1, -1), (1, 1, 1)]
    specs = draw_specializations(7, 3, ws)
    assert len(set(specs)) == 3
    assert all(s.value(w) != 0 for s in specs for w in ws)
    with pytest.raises(DegenerateSpecialization):
        draw_specializations(7, 2, [(0, 0, 0)])


def test_engine_gate(p1xp2):
    with pytest.raises(EngineUnavailable):
        chern_numbers(p1xp2, (2, 0), 2)


def test_wrong_degree_index(p3):
    with pytest.raises(ValueError):
        chern_numbers(p3, (1,), 1, [(2,)])


def _negated(X):
    doc = X.to_json()
    neg = lambda w: [-x for x in w]
    for fp in doc["fixed_points"]:
        fp["tangent_weights"] = [neg(w) for w in fp["tangent_weights"]]
    for e in doc["edges"]:
        e["u0"] = neg(e["u0"])
        e["nu"] = [neg(w) for w in e["nu"]]
        e["nuprime"] = [neg(w) for w in e["nuprime"]]
    return load_and_validate(doc)


@pytest.mark.parametrize("geo,cls,d", DEG1_CASES)
def test_torus_relabelling_invariance(geo, cls, d):
    X, beta = geometry_and_class(geo, cls)
    base = chern_numbers(X, beta, 2)
    assert chern_numbers(X.permute_torus((2, 0, 1)), beta, 2) == base
    assert chern_numbers(_negated(X), beta, 2) == base
