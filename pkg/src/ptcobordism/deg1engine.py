"""T-fixed stable pairs for classes carried by a single invariant line.

For such a class every T-fixed pair is ``O_X -> O_C(a p + b p')`` on an
invariant curve ``C`` with ``a, b >= 0`` and ``chi = 1 + a + b``.  With the
section fixed at weight zero, the virtual tangent character is

    T = chi(O,F) + chi(F,O) - chi(F,F)
      = chi(L) + chi(L^v (x) det N) - chi(O_C) + chi(N1) + chi(N2) - chi(N1 (x) N2)

using ``Ext^q(O_C, O_X) = det N`` (q = 2) and ``Ext^q(O_C, O_C) = wedge^q N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .errors import NonIsolatedFixedPoint, NotDegreeOne
from .exactalg import ZERO_WEIGHT, CharFraction, LaurentPoly, Weight, cf_combine, wadd, wneg, wscale
from .toric3 import Edge, ToricThreefold, decompose_class


@dataclass(frozen=True)
class FixedPairDeg1:
    edge: Edge
    a: int
    b: int

    @property
    def n(self) -> int:
        return 1 + self.a + self.b

    def swapped(self) -> "FixedPairDeg1":
        return FixedPairDeg1(self.edge.reversed(), self.b, self.a)

    def sort_key(self):
        return (self.edge.index, self.edge.p, self.a, self.b)


def is_degree_one(X: ToricThreefold, beta: Sequence[int]) -> bool:
    return all(len(dec) == 1 and dec[0][1] == 1 for dec in decompose_class(X, beta))


def enumerate_deg1(X: ToricThreefold, beta: Sequence[int], n: int) -> list[FixedPairDeg1]:
    decs = decompose_class(X, beta)
    for dec in decs:
        if len(dec) != 1 or dec[0][1] != 1:
            raise NotDegreeOne(f"class {tuple(beta)} admits the decomposition {[(e.index, k) for e, k in dec]}")
    if n <= 0:
        return []
    return [FixedPairDeg1(dec[0][0], a, n - 1 - a) for dec in decs for a in range(n)]


def equivariant_chi(edge: Edge, w0: Sequence[int], m: int) -> CharFraction:
    """Two-point localization of chi(C, L) for L of degree m with fiber weight w0 at p."""
    u0 = edge.u0
    at_p = CharFraction(LaurentPoly.monomial(w0), [u0])
    at_q = CharFraction(LaurentPoly.monomial(wadd(w0, wscale(m, u0))), [wneg(u0)])
    return cf_combine(at_p, at_q)


def _chi(edge: Edge, w0: Weight, m: int) -> LaurentPoly:
    return equivariant_chi(edge, w0, m).normalize()


@lru_cache(maxsize=None)
def _tvir(edge: Edge, a: int, b: int) -> LaurentPoly:
    u0 = edge.u0
    nu1, nu2 = edge.nu
    m1, m2 = edge.degrees
    detw = wadd(nu1, nu2)
    char = (
        _chi(edge, wscale(-a, u0), a + b)
        + _chi(edge, wadd(wscale(a, u0), detw), m1 + m2 - a - b)
        - _chi(edge, ZERO_WEIGHT, 0)
        + _chi(edge, nu1, m1)
        + _chi(edge, nu2, m2)
        - _chi(edge, detw, m1 + m2)
    )
    return char


def tvir_character_deg1(pair: FixedPairDeg1) -> LaurentPoly:
    char = _tvir(pair.edge, pair.a, pair.b)
    if char.coeff(ZERO_WEIGHT) != 0:
        raise NonIsolatedFixedPoint(f"zero weight in T^vir of {pair}")
    m1, m2 = pair.edge.degrees
    assert char.rank() == m1 + m2 + 2, "rank bookkeeping violated"
    return char
