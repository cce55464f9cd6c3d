"""T-fixed stable pairs for arbitrary effective classes, via the vertex formalism.

A T-fixed pair is a Cohen-Macaulay T-invariant curve ``C`` (one 2D partition
per invariant line, read in the normal eigen-directions) together with, at
each fixed point, a finite T-invariant submodule of ``M / O_C`` where ``M`` is
the sum of the leg modules localized along their own axes.  In local
exponent coordinates a weight lying in r leg cylinders contributes a weight
space of ``M / O_C`` of dimension ``r - 1`` (if nonnegative) or ``1`` (negative
depth, r = 1).  Configurations needing a 2-dimensional weight space are
refused with NonIsolatedFixedLocus.

The virtual tangent character is ``sum_a V_a`` with

    V = F - Fbar/(t1 t2 t3) + F Fbar (1-t1)(1-t2)(1-t3)/(t1 t2 t3),

``F`` the character of the pair's sheaf on the chart and ``t_i`` the
coordinate-function characters.  Configurations whose connected components
are all single reduced lines use the product of degree-one characters.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Sequence

from .deg1engine import FixedPairDeg1, tvir_character_deg1
from .errors import NonIsolatedFixedLocus, NonIsolatedFixedPoint
from .exactalg import ZERO_WEIGHT, CharFraction, LaurentPoly, Weight, cf_sum, wadd, wneg, wscale
from .toric3 import ToricThreefold, decompose_class, virtual_dimension

Exps = tuple[int, int, int]
Partition = tuple[int, ...]


# --------------------------------------------------------------------------
# combinatorics

@lru_cache(maxsize=None)
def partitions(k: int, largest: int | None = None) -> tuple[Partition, ...]:
    if largest is None:
        largest = k
    if k == 0:
        return ((),)
    out = []
    for first in range(min(k, largest), 0, -1):
        for rest in partitions(k - first, first):
            out.append((first,) + rest)
    return tuple(out)


def cells(lam: Partition) -> list[tuple[int, int]]:
    """``(c1, c2)`` with ``c1`` along the first normal direction."""
    return [(i, j) for i, row in enumerate(lam) for j in range(row)]


@dataclass(frozen=True)
class EdgeAssignment:
    """Edge index -> nonempty partition; the class is ``sum |lam_e| [C_e]``."""

    parts: tuple[tuple[int, Partition], ...]

    def partition(self, edge_index: int) -> Partition | None:
        for i, lam in self.parts:
            if i == edge_index:
                return lam
        return None

    def curve_class(self, X: ToricThreefold) -> tuple[int, ...]:
        total = [0] * X.h2_rank
        for i, lam in self.parts:
            for k, c in enumerate(X.edges[i].curve_class):
                total[k] += sum(lam) * c
        return tuple(total)

    def key(self):
        return self.parts


def edge_assignments(X: ToricThreefold, beta: Sequence[int]) -> list[EdgeAssignment]:
    out = []
    for dec in decompose_class(X, beta):
        choices = [[(e.index, lam) for lam in partitions(k)] for e, k in dec]
        for combo in product(*choices):
            out.append(EdgeAssignment(tuple(sorted(combo))))
    return out


# --------------------------------------------------------------------------
# local vertex data

@dataclass(frozen=True)
class Leg:
    axis: int
    cells: frozenset  # exponent triples with axis coordinate 0

    def contains(self, w: Exps) -> bool:
        base = tuple(0 if k == self.axis else w[k] for k in range(3))
        return base in self.cells


def _axis_of(tangents: Sequence[Weight], weight: Weight) -> int:
    for k, t in enumerate(tangents):
        if tuple(t) == tuple(weight):
            return k
    raise ValueError(f"weight {weight} is not a tangent weight at this vertex")


def vertex_legs(X: ToricThreefold, vid: str, assignment: EdgeAssignment) -> tuple[Leg, ...]:
    tangents = X.point(vid).tangent_weights
    legs = []
    for e in X.edges_at(vid):
        lam = assignment.partition(e.index)
        if not lam:
            continue
        axis = _axis_of(tangents, wneg(e.u0))
        n1 = _axis_of(tangents, e.nu[0])
        n2 = _axis_of(tangents, e.nu[1])
        cs = []
        for c1, c2 in cells(lam):
            w = [0, 0, 0]
            w[n1], w[n2] = c1, c2
            cs.append(tuple(w))
        legs.append(Leg(axis, frozenset(cs)))
    return tuple(sorted(legs, key=lambda leg: leg.axis))


def _legs_at(legs: Sequence[Leg], w: Exps) -> tuple[int, ...]:
    return tuple(i for i, leg in enumerate(legs) if leg.contains(w))


def _overlap_weights(legs: Sequence[Leg]) -> dict[Exps, tuple[int, ...]]:
    """Nonnegative exponents lying in at least two leg cylinders."""
    if len(legs) < 2:
        return {}
    reach = 1 + max(max(c) for leg in legs for c in leg.cells)
    out = {}
    for leg in legs:
        for c in leg.cells:
            for t in range(reach):
                w = tuple(t if k == leg.axis else c[k] for k in range(3))
                inside = _legs_at(legs, w)
                if len(inside) >= 2:
                    out[w] = inside
    return out


def _image_nonzero(legs: Sequence[Leg], w: Exps, k: int) -> bool:
    """Is ``x_k`` applied to the class at ``w`` nonzero in ``M/O_C``?"""
    src = _legs_at(legs, w)
    tgt_w = tuple(w[i] + (1 if i == k else 0) for i in range(3))
    tgt = _legs_at(legs, tgt_w)
    if not tgt:
        return False
    # representative: first leg carries 1 (well defined modulo the diagonal)
    rep = {src[0]: 1}
    image = [rep.get(i, 0) for i in tgt]
    if min(tgt_w) < 0:
        return any(image)
    return len(set(image)) > 1


@dataclass(frozen=True)
class VertexBoxes:
    candidates: tuple[Exps, ...]
    forces: dict

    def enumerate(self, budget: int) -> list[list[frozenset]]:
        """``levels[s]`` = all finite T-invariant submodules with s boxes."""
        levels: list[list[frozenset]] = [[frozenset()]]
        for _ in range(budget):
            nxt = set()
            for S in levels[-1]:
                for b in self.candidates:
                    if b not in S and self.forces[b] <= S:
                        nxt.add(S | {b})
            levels.append(sorted(nxt, key=lambda s: sorted(s)))
        return levels


@lru_cache(maxsize=None)
def vertex_boxes(legs: tuple[Leg, ...], budget: int) -> VertexBoxes:
    overlaps = _overlap_weights(legs)
    if budget > 0 and any(len(v) >= 3 for v in overlaps.values()):
        raise NonIsolatedFixedLocus("three legs share a weight: the box quotient is not one-dimensional")
    cands: list[Exps] = sorted(overlaps)
    for leg in legs:
        for c in leg.cells:
            for depth in range(1, budget + 1):
                cands.append(tuple(-depth if k == leg.axis else c[k] for k in range(3)))
    cand_set = set(cands)
    forces = {}
    for b in cands:
        f = set()
        for k in range(3):
            if _image_nonzero(legs, b, k):
                tgt = tuple(b[i] + (1 if i == k else 0) for i in range(3))
                if tgt in cand_set:
                    f.add(tgt)
        forces[b] = frozenset(f)
    return VertexBoxes(tuple(sorted(cands)), forces)


@lru_cache(maxsize=None)
def _vertex_levels(legs: tuple[Leg, ...], budget: int) -> tuple[tuple[frozenset, ...], ...]:
    return tuple(tuple(level) for level in vertex_boxes(legs, budget).enumerate(budget))


# --------------------------------------------------------------------------
# characters

def _frame(X: ToricThreefold, vid: str) -> tuple[Weight, Weight, Weight]:
    """Coordinate-function weights at a vertex (negated tangent weights)."""
    return tuple(wneg(t) for t in X.point(vid).tangent_weights)


def _weight(frame, w: Exps) -> Weight:
    out = ZERO_WEIGHT
    for k in range(3):
        if w[k]:
            out = wadd(out, wscale(w[k], frame[k]))
    return out


def curve_character(X: ToricThreefold, vid: str, legs: Sequence[Leg]) -> CharFraction:
    """Character of ``O_C`` on the chart at ``vid``."""
    frame = _frame(X, vid)
    parts = []
    for leg in legs:
        num = LaurentPoly((_weight(frame, c), 1) for c in leg.cells)
        parts.append(CharFraction(num, [frame[leg.axis]]))
    overlaps = _overlap_weights(legs)
    if overlaps:
        parts.append(CharFraction(LaurentPoly((_weight(frame, w), -(len(v) - 1)) for w, v in overlaps.items())))
    return cf_sum(parts)


@lru_cache(maxsize=None)
def _vertex_term(X: ToricThreefold, vid: str, legs: tuple[Leg, ...], boxes: frozenset) -> CharFraction:
    frame = _frame(X, vid)
    F = curve_character(X, vid, legs)
    if boxes:
        F = F + CharFraction(LaurentPoly((_weight(frame, b), 1) for b in boxes))
    Fbar = F.bar()
    inv = LaurentPoly.monomial(wneg(wadd(wadd(frame[0], frame[1]), frame[2])))
    P = LaurentPoly.one()
    for f in frame:
        P = P - P.shift(f)
    return F - Fbar * inv + F * Fbar * (P * inv)


def _support_vertices(X: ToricThreefold, assignment: EdgeAssignment) -> list[str]:
    vs = set()
    for i, _ in assignment.parts:
        vs.update(X.edges[i].endpoints())
    return sorted(vs)


@lru_cache(maxsize=None)
def chi_curve(X: ToricThreefold, assignment: EdgeAssignment) -> int:
    total = cf_sum(curve_character(X, v, vertex_legs(X, v, assignment)) for v in _support_vertices(X, assignment))
    return int(total.normalize().rank())


# --------------------------------------------------------------------------
# fixed pairs

@dataclass(frozen=True)
class GeneralFixedPair:
    X: ToricThreefold
    assignment: EdgeAssignment
    boxes: tuple[tuple[str, frozenset], ...]  # vertex id -> box exponents, support vertices only
    n: int

    def box_count(self) -> int:
        return sum(len(b) for _, b in self.boxes)

    def components(self) -> list[list[int]]:
        """Connected components of the support, as lists of edge indices."""
        parent = {i: i for i, _ in self.assignment.parts}

        def find(i):
            while parent[i] != i:
                i = parent[i]
            return i

        idx = list(parent)
        for a in idx:
            for b in idx:
                if a < b and set(self.X.edges[a].endpoints()) & set(self.X.edges[b].endpoints()):
                    parent[find(a)] = find(b)
        groups: dict[int, list[int]] = {}
        for i in idx:
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())

    def deg1_components(self) -> list[FixedPairDeg1] | None:
        """Degree-one data per component when every component is a single reduced line."""
        comps = self.components()
        if any(len(c) != 1 or sum(self.assignment.partition(c[0])) != 1 for c in comps):
            return None
        boxes = dict(self.boxes)
        out = []
        for (i,) in comps:
            e = self.X.edges[i]
            out.append(FixedPairDeg1(e, len(boxes.get(e.p, ())), len(boxes.get(e.pprime, ()))))
        return out

    def sort_key(self):
        return (
            self.assignment.key(),
            tuple((v, tuple(sorted(b))) for v, b in self.boxes),
        )

    def describe(self) -> dict:
        return {
            "edges": [{"edge": i, "partition": list(lam)} for i, lam in self.assignment.parts],
            "boxes": {v: [list(b) for b in sorted(s)] for v, s in self.boxes if s},
            "n": self.n,
        }


def enumerate_general(X: ToricThreefold, beta: Sequence[int], n: int) -> list[GeneralFixedPair]:
    """Every T-fixed pair with class ``beta`` and ``chi(F) = n``."""
    out: list[GeneralFixedPair] = []
    for asg in edge_assignments(X, beta):
        budget = n - chi_curve(X, asg)
        if budget < 0:
            continue
        verts = _support_vertices(X, asg)
        levels = [_vertex_levels(vertex_legs(X, v, asg), budget) for v in verts]

        def rec(i: int, left: int, acc: list):
            if i == len(verts):
                if left == 0:
                    out.append(GeneralFixedPair(X, asg, tuple(acc), n))
                return
            for s in range(left + 1):
                for S in levels[i][s]:
                    acc.append((verts[i], S))
                    rec(i + 1, left - s, acc)
                    acc.pop()

        rec(0, budget, [])
    out.sort(key=GeneralFixedPair.sort_key)
    return out


def general_character(pair: GeneralFixedPair, route: str = "auto") -> LaurentPoly:
    """Normalized T^vir character; ``route`` is ``auto``, ``vertex`` or ``product``."""
    comps = pair.deg1_components() if route in ("auto", "product") else None
    if route == "product" and comps is None:
        raise ValueError("product rule needs every component to be a single reduced line")
    if comps is not None:
        char = LaurentPoly.zero()
        for c in comps:
            char = char + tvir_character_deg1(c)
    else:
        X = pair.X
        terms = [_vertex_term(X, v, vertex_legs(X, v, pair.assignment), S) for v, S in pair.boxes]
        char = cf_sum(terms).normalize()
    if char.coeff(ZERO_WEIGHT) != 0:
        raise NonIsolatedFixedPoint(f"zero weight in T^vir of {pair.describe()}")
    d = virtual_dimension(pair.X, pair.assignment.curve_class(pair.X))
    if char.rank() != d:
        raise AssertionError(f"rank {char.rank()} differs from the virtual dimension {d}")
    return char
