import copy
import json

import pytest

from ptcobordism.errors import ParseError, ValidationError, ZeroClass
from ptcobordism.toric3 import (
    decompose_class,
    load_and_validate,
    parse_class,
    validate,
    virtual_dimension,
)


@pytest.mark.parametrize("geo,points,edges", [("p3", 4, 6), ("p1xp2", 6, 9), ("p1p1p1", 8, 12)])
def test_catalog_shapes(geo, points, edges):
    X = load_and_validate(geo)
    assert len(X.fixed_points) == points
    assert len(X.edges) == edges


@pytest.mark.parametrize("geo,cls,d", [("p3", "line", 4), ("p1xp2", "fiber", 2), ("p1xp2", "line", 3), ("p1p1p1", "e1+e2", 4), ("p1xp2", "2*fiber", 4)])
def test_virtual_dimension(geo, cls, d):
    X = load_and_validate(geo)
    assert virtual_dimension(X, parse_class(X, cls)) == d


def test_zero_class(p3):
    with pytest.raises(ZeroClass):
        virtual_dimension(p3, (0,))


def test_parse_class_forms(p1xp2):
    assert parse_class(p1xp2, "1,0") == (1, 0)
    assert parse_class(p1xp2, "2*fiber + line") == (2, 1)
    with pytest.raises(ParseError):
        parse_class(p1xp2, "nonsense class")
    with pytest.raises(ParseError):
        parse_class(p1xp2, "1,2,3")


def test_json_roundtrip(p1xp2):
    Y = load_and_validate(json.loads(json.dumps(p1xp2.to_json())))
    assert Y.geometry_hash() == p1xp2.geometry_hash()
    assert Y.class_names == p1xp2.class_names


@pytest.mark.parametrize(
    "mutate,rule",
    [
        (lambda d: d["edges"][0].__setitem__("u0", [5, 5, 5]), "tangent-membership"),
        (lambda d: d["edges"][0].__setitem__("class", [3]), "c1-degree"),
        (lambda d: d["edges"][0].__setitem__("pprime", "nowhere"), "endpoints"),
        (lambda d: d["fixed_points"][1].__setitem__("id", d["fixed_points"][0]["id"]), "unique-ids"),
    ],
)
def test_validation_rules(p3, mutate, rule):
    doc = copy.deepcopy(p3.to_json())
    mutate(doc)
    with pytest.raises(ValidationError) as err:
        load_and_validate(doc)
    assert err.value.rule == rule


def test_malformed_json(tmp_path):
    path = tmp_path / "g.json"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        load_and_validate(str(path))


def test_permuted_torus_still_valid(p1xp2):
    validate(p1xp2.permute_torus((2, 0, 1)))


def test_decompositions(p1xp2, p1p1p1):
    assert len(decompose_class(p1xp2, (1, 0))) == 3
    # 2*fiber: three doubled fibers plus three pairs of distinct fibers
    assert len(decompose_class(p1xp2, (2, 0))) == 6
    assert len(decompose_class(p1p1p1, (1, 1, 0))) == 16
