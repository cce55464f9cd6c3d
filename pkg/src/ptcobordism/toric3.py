"""Nonsingular projective toric 3-folds as fixed-point / invariant-curve data.

Weight conventions: the coordinate function along an invariant curve, at
its endpoint ``p``, has character ``u0``; the tangent direction along the
curve at ``p`` therefore has weight ``-u0``.  Normal weights ``nu`` are
tangent weights of the normal directions; across the curve they shift by
``nu' - nu = m * u0`` where ``m`` is the degree of that normal line bundle.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from .errors import ParseError, ValidationError, ZeroClass
from .exactalg import Weight, wneg, wsub

CurveClass = tuple[int, ...]


@dataclass(frozen=True)
class FixedPoint:
    id: str
    tangent_weights: tuple[Weight, Weight, Weight]


@dataclass(frozen=True)
class Edge:
    index: int
    p: str
    pprime: str
    u0: Weight
    nu: tuple[Weight, Weight]
    nuprime: tuple[Weight, Weight]
    curve_class: CurveClass

    @property
    def degrees(self) -> tuple[int, int]:
        """``(m1, m2)``; only meaningful after validation."""
        return tuple(_multiple(wsub(b, a), self.u0) for a, b in zip(self.nu, self.nuprime))

    def reversed(self) -> "Edge":
        """The same curve seen from the other endpoint."""
        return Edge(self.index, self.pprime, self.p, wneg(self.u0), self.nuprime, self.nu, self.curve_class)

    def endpoints(self) -> tuple[str, str]:
        return (self.p, self.pprime)


@dataclass(frozen=True)
class ToricThreefold:
    name: str
    fixed_points: tuple[FixedPoint, ...]
    edges: tuple[Edge, ...]
    h2_rank: int
    c1_degrees: tuple[int, ...]
    class_names: tuple[tuple[str, CurveClass], ...] = ()
    # dimensions of projective-space factors, when X is a product of them
    product_dims: tuple[int, ...] | None = None
    source: str = ""
    _points: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_points", {fp.id: fp for fp in self.fixed_points})

    def point(self, pid: str) -> FixedPoint:
        return self._points[pid]

    def edges_at(self, pid: str) -> list[Edge]:
        """Edges incident to ``pid``, oriented to start there."""
        out = []
        for e in self.edges:
            if e.p == pid:
                out.append(e)
            elif e.pprime == pid:
                out.append(e.reversed())
        return out

    def named_class(self, name: str) -> CurveClass:
        for key, vec in self.class_names:
            if key == name:
                return vec
        raise ParseError(f"unknown curve class name {name!r} for geometry {self.name}")

    def to_json(self) -> dict:
        return {
            "h2_rank": self.h2_rank,
            "c1_degrees": list(self.c1_degrees),
            "fixed_points": [
                {"id": fp.id, "tangent_weights": [list(w) for w in fp.tangent_weights]}
                for fp in self.fixed_points
            ],
            "edges": [
                {
                    "p": e.p,
                    "pprime": e.pprime,
                    "u0": list(e.u0),
                    "nu": [list(w) for w in e.nu],
                    "nuprime": [list(w) for w in e.nuprime],
                    "class": list(e.curve_class),
                }
                for e in self.edges
            ],
            "class_names": {n: list(v) for n, v in self.class_names},
            "product_dims": list(self.product_dims) if self.product_dims else None,
        }

    def geometry_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def permute_torus(self, perm: Sequence[int]) -> "ToricThreefold":
        """Relabel torus parameters: weight component i moves to position perm[i]."""

        def pw(w):
            out = [0, 0, 0]
            for i, x in enumerate(w):
                out[perm[i]] = x
            return tuple(out)

        fps = tuple(FixedPoint(fp.id, tuple(pw(w) for w in fp.tangent_weights)) for fp in self.fixed_points)
        edges = tuple(
            Edge(e.index, e.p, e.pprime, pw(e.u0), tuple(pw(w) for w in e.nu), tuple(pw(w) for w in e.nuprime), e.curve_class)
            for e in self.edges
        )
        return ToricThreefold(self.name, fps, edges, self.h2_rank, self.c1_degrees, self.class_names, self.product_dims, self.source)


def _multiple(diff: Sequence[int], u: Sequence[int]) -> int | None:
    """Integer m with diff == m*u, or None."""
    m = None
    for d, x in zip(diff, u):
        if x == 0:
            if d != 0:
                return None
            continue
        if d % x:
            return None
        q = d // x
        if m is None:
            m = q
        elif m != q:
            return None
    return 0 if m is None else m


def _independent(a: Sequence[int], b: Sequence[int]) -> bool:
    cross = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
    return cross != (0, 0, 0)


def validate(X: ToricThreefold) -> ToricThreefold:
    """Check every edge against the toric compatibility rules; return X."""
    ids = [fp.id for fp in X.fixed_points]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate fixed point ids", rule="unique-ids")
    for fp in X.fixed_points:
        a, b, c = fp.tangent_weights
        if not (_independent(a, b) and _independent(a, c) and _independent(b, c)):
            raise ValidationError(f"tangent weights at {fp.id} are not pairwise independent", rule="smooth-point")
    if len(X.c1_degrees) != X.h2_rank:
        raise ValidationError("c1_degrees length differs from h2_rank", rule="class-table")
    for e in X.edges:
        for pid in (e.p, e.pprime):
            if pid not in X._points:
                raise ValidationError(f"edge {e.index}: unknown endpoint {pid}", edge=e.index, rule="endpoints")
        if e.p == e.pprime:
            raise ValidationError(f"edge {e.index}: degenerate edge", edge=e.index, rule="endpoints")
        if len(e.curve_class) != X.h2_rank:
            raise ValidationError(f"edge {e.index}: class has wrong length", edge=e.index, rule="class-table")
        tp = X.point(e.p).tangent_weights
        tq = X.point(e.pprime).tangent_weights
        if wneg(e.u0) not in tp:
            raise ValidationError(f"edge {e.index}: -u0 is not a tangent weight at {e.p}", edge=e.index, rule="tangent-membership")
        if e.u0 not in tq:
            raise ValidationError(f"edge {e.index}: u0 is not a tangent weight at {e.pprime}", edge=e.index, rule="tangent-membership")
        ms = []
        for i in range(2):
            m = _multiple(wsub(e.nuprime[i], e.nu[i]), e.u0)
            if m is None:
                raise ValidationError(
                    f"edge {e.index}: nu'_{i + 1} - nu_{i + 1} is not an integer multiple of u0",
                    edge=e.index,
                    rule="normal-shift",
                )
            ms.append(m)
        if sorted((wneg(e.u0),) + tuple(e.nu)) != sorted(tp) or sorted((e.u0,) + tuple(e.nuprime)) != sorted(tq):
            raise ValidationError(f"edge {e.index}: normal weights do not complete the tangent weights", edge=e.index, rule="normal-weights")
        deg = sum(k * c for k, c in zip(e.curve_class, X.c1_degrees))
        if deg != ms[0] + ms[1] + 2:
            raise ValidationError(
                f"edge {e.index}: c1 degree {deg} != m1 + m2 + 2 = {ms[0] + ms[1] + 2}",
                edge=e.index,
                rule="c1-degree",
            )
    return X


# --------------------------------------------------------------------------
# catalog

def product_of_projective_spaces(name: str, factor_weights: Sequence[Sequence[Weight]], class_names=()) -> ToricThreefold:
    """Toric data of ``P^{n1} x ... x P^{nk}``; factor f has coordinates with weights ``factor_weights[f]``."""
    dims = tuple(len(ws) - 1 for ws in factor_weights)
    if sum(dims) != 3:
        raise ValueError("not a 3-fold")
    points = list(itertools.product(*[range(len(ws)) for ws in factor_weights]))

    def pid(pt):
        return "p" + "".join(str(i) for i in pt)

    def tangents(pt):
        out = []
        for f, ws in enumerate(factor_weights):
            i = pt[f]
            out.extend(wsub(ws[i], ws[k]) for k in range(len(ws)) if k != i)
        return tuple(out)

    fps = tuple(FixedPoint(pid(pt), tangents(pt)) for pt in points)
    edges = []
    for pt in points:
        for f, ws in enumerate(factor_weights):
            i = pt[f]
            for j in range(i + 1, len(ws)):
                qt = pt[:f] + (j,) + pt[f + 1:]
                u0 = wsub(ws[j], ws[i])
                nu, nuq = [], []
                # same-factor normals first (degree 1), then the other factors (degree 0)
                for k in range(len(ws)):
                    if k not in (i, j):
                        nu.append(wsub(ws[i], ws[k]))
                        nuq.append(wsub(ws[j], ws[k]))
                for g, wg in enumerate(factor_weights):
                    if g == f:
                        continue
                    for k in range(len(wg)):
                        if k != pt[g]:
                            nu.append(wsub(wg[pt[g]], wg[k]))
                            nuq.append(wsub(wg[pt[g]], wg[k]))
                cls = tuple(1 if g == f else 0 for g in range(len(factor_weights)))
                edges.append(Edge(len(edges), pid(pt), pid(qt), u0, tuple(nu), tuple(nuq), cls))
    c1 = tuple(n + 1 for n in dims)
    return validate(
        ToricThreefold(name, fps, tuple(edges), len(dims), c1, tuple(class_names), dims, source=f"catalog:{name}")
    )


_E0, _E1, _E2, _E3 = (0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)


def _catalog_p3():
    return product_of_projective_spaces("p3", [[_E0, _E1, _E2, _E3]], [("line", (1,))])


def _catalog_p1xp2():
    return product_of_projective_spaces("p1xp2", [[_E0, _E1], [_E0, _E2, _E3]], [("fiber", (1, 0)), ("line", (0, 1))])


def _catalog_p1p1p1():
    return product_of_projective_spaces(
        "p1p1p1", [[_E0, _E1], [_E0, _E2], [_E0, _E3]], [("e1", (1, 0, 0)), ("e2", (0, 1, 0)), ("e3", (0, 0, 1))]
    )


CATALOG = {"p3": _catalog_p3, "p1xp2": _catalog_p1xp2, "p1p1p1": _catalog_p1p1p1}


# --------------------------------------------------------------------------
# JSON ingestion

def _weight(obj: Any, what: str) -> Weight:
    if not (isinstance(obj, list) and len(obj) == 3 and all(isinstance(x, int) and not isinstance(x, bool) for x in obj)):
        raise ParseError(f"{what}: expected a list of 3 integers, got {obj!r}")
    return tuple(obj)


def from_json(doc: Mapping[str, Any], name: str = "json", source: str = "") -> ToricThreefold:
    try:
        h2 = doc["h2_rank"]
        c1 = doc["c1_degrees"]
        fps_raw = doc["fixed_points"]
        edges_raw = doc["edges"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing key {exc}") from None
    if not isinstance(h2, int) or not isinstance(c1, list) or not all(isinstance(x, int) for x in c1):
        raise ParseError("h2_rank must be an int and c1_degrees a list of ints")
    fps = []
    for k, raw in enumerate(fps_raw):
        try:
            tw = raw["tangent_weights"]
            pid = str(raw["id"])
        except (KeyError, TypeError):
            raise ParseError(f"fixed_points[{k}] malformed") from None
        if not isinstance(tw, list) or len(tw) != 3:
            raise ParseError(f"fixed_points[{k}].tangent_weights must hold 3 weights")
        fps.append(FixedPoint(pid, tuple(_weight(w, f"fixed_points[{k}]") for w in tw)))
    edges = []
    for k, raw in enumerate(edges_raw):
        try:
            nu = raw["nu"]
            nuq = raw["nuprime"]
            if len(nu) != 2 or len(nuq) != 2:
                raise ParseError(f"edges[{k}]: nu and nuprime hold two weights each")
            cls = raw["class"]
            if not all(isinstance(x, int) for x in cls):
                raise ParseError(f"edges[{k}].class must be integers")
            edges.append(
                Edge(
                    k,
                    str(raw["p"]),
                    str(raw["pprime"]),
                    _weight(raw["u0"], f"edges[{k}].u0"),
                    tuple(_weight(w, f"edges[{k}].nu") for w in nu),
                    tuple(_weight(w, f"edges[{k}].nuprime") for w in nuq),
                    tuple(cls),
                )
            )
        except (KeyError, TypeError):
            raise ParseError(f"edges[{k}] malformed") from None
    names = tuple((str(n), tuple(v)) for n, v in (doc.get("class_names") or {}).items())
    dims = doc.get("product_dims")
    if dims is not None and (not isinstance(dims, list) or not all(isinstance(x, int) and x > 0 for x in dims)):
        raise ParseError("product_dims must be a list of positive integers")
    return ToricThreefold(name, tuple(fps), tuple(edges), h2, tuple(c1), names, tuple(dims) if dims else None, source)


def load_and_validate(source: str | Path | Mapping[str, Any]) -> ToricThreefold:
    """Catalog id, path to a JSON document, or an already-parsed document."""
    if isinstance(source, Mapping):
        return validate(from_json(source))
    key = str(source)
    if key in CATALOG:
        return CATALOG[key]()
    path = Path(key)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read geometry {key!r}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{key}: invalid JSON ({exc})") from None
    return validate(from_json(doc, name=path.stem, source=str(path)))


# --------------------------------------------------------------------------
# curve classes

def virtual_dimension(X: ToricThreefold, beta: Sequence[int]) -> int:
    beta = tuple(beta)
    if not any(beta):
        raise ZeroClass("curve class is zero")
    return sum(b * c for b, c in zip(beta, X.c1_degrees))


def parse_class(X: ToricThreefold, text: str) -> CurveClass:
    """``"fiber"``, ``"2*fiber"``, ``"e1+e2"``, or a plain vector ``"1,0"``."""
    text = text.strip()
    if re.fullmatch(r"-?\d+(\s*,\s*-?\d+)*", text):
        vec = tuple(int(x) for x in text.split(","))
        if len(vec) != X.h2_rank:
            raise ParseError(f"class vector {vec} has wrong length for h2 rank {X.h2_rank}")
        return vec
    total = [0] * X.h2_rank
    for term in text.split("+"):
        m = re.fullmatch(r"\s*(?:(\d+)\s*\*?\s*)?([A-Za-z_]\w*)\s*", term)
        if not m:
            raise ParseError(f"cannot parse curve class {text!r}")
        k = int(m.group(1) or 1)
        for i, x in enumerate(X.named_class(m.group(2))):
            total[i] += k * x
    return tuple(total)


def decompose_class(X: ToricThreefold, beta: Sequence[int]) -> list[tuple[tuple[Edge, int], ...]]:
    """All ways to write ``beta = sum k_e [C_e]`` with ``k_e >= 1`` over distinct edges."""
    beta = tuple(beta)
    if not any(beta):
        raise ZeroClass("curve class is zero")
    for e in X.edges:
        if any(x < 0 for x in e.curve_class) or not any(e.curve_class):
            raise ValueError(f"edge {e.index} has a non-effective class {e.curve_class}")
    edges = X.edges
    out: list[tuple[tuple[Edge, int], ...]] = []

    def rec(i: int, rem: tuple[int, ...], acc: list[tuple[Edge, int]]):
        if not any(rem):
            out.append(tuple(acc))
            return
        if i == len(edges):
            return
        cls = edges[i].curve_class
        rec(i + 1, rem, acc)
        k = 1
        while True:
            nxt = tuple(r - k * c for r, c in zip(rem, cls))
            if any(x < 0 for x in nxt):
                break
            acc.append((edges[i], k))
            rec(i + 1, nxt, acc)
            acc.pop()
            k += 1

    if any(x < 0 for x in beta):
        return []
    rec(0, beta, [])
    out.sort(key=lambda dec: [(e.index, k) for e, k in dec])
    return out
