import pytest

from ptcobordism.toric3 import load_and_validate, parse_class


@pytest.fixture(scope="session")
def p3():
    return load_and_validate("p3")


@pytest.fixture(scope="session")
def p1xp2():
    return load_and_validate("p1xp2")


@pytest.fixture(scope="session")
def p1p1p1():
    return load_and_validate("p1p1p1")


# (catalog id, class, d) for the degree-one tables
DEG1_CASES = [("p1xp2", "fiber", 2), ("p1xp2", "line", 3), ("p3", "line", 4)]


def geometry_and_class(geo, cls):
    X = load_and_validate(geo)
    return X, parse_class(X, cls)
