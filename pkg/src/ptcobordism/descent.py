"""Descendent bookkeeping on products of projective spaces.

Cohomology classes are Q-combinations of monomials ``h1^a1 h2^a2 ...`` in the
hyperplane classes of the factors.  ``grr_expansion`` writes ``ch_k(-T^vir)``
as a combination of (generalized) descendents by expanding
``ch(I) ch(I^v) Td(X)`` with ``ch(I) = 1 - ch(F)`` and
``ch_i(E^v) = (-1)^i ch_i(E)``; ``reduce_generalized`` then splits every
``tau_{i,j}(gamma)`` over a Kunneth decomposition of the diagonal.

Plain-text grammar (one term per line)::

    term  := coeff " * " tau ( " * " tau )?
    tau   := "tau[" int ( "," int )? "](" class ")"
    class := "1" | factor ( " " factor )*
    factor:= "h" int ( "^" int )?
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from .errors import ParseError, UnsupportedSpace
from .toric3 import ToricThreefold

Mono = tuple[int, ...]


def _dims(X: ToricThreefold | Sequence[int]) -> tuple[int, ...]:
    if isinstance(X, ToricThreefold):
        if X.product_dims is None:
            raise UnsupportedSpace(f"{X.name} is not presented as a product of projective spaces")
        return tuple(X.product_dims)
    dims = tuple(int(n) for n in X)
    if not dims or any(n < 1 for n in dims):
        raise UnsupportedSpace(f"unsupported factor dimensions {dims}")
    return dims


class CohClass:
    """Element of ``H^*(P^{n1} x ... x P^{nk}, Q)`` in the monomial basis."""

    __slots__ = ("dims", "terms")

    def __init__(self, dims: Sequence[int], terms: Mapping[Mono, Fraction | int] | None = None):
        self.dims = tuple(dims)
        out = {}
        for m, c in (terms or {}).items():
            m = tuple(m)
            if len(m) != len(self.dims) or any(a < 0 for a in m):
                raise ValueError(f"bad monomial {m}")
            if any(a > n for a, n in zip(m, self.dims)) or c == 0:
                continue
            out[m] = out.get(m, 0) + Fraction(c)
        self.terms = {m: c for m, c in out.items() if c != 0}

    @classmethod
    def one(cls, dims) -> "CohClass":
        return cls(dims, {(0,) * len(dims): 1})

    @classmethod
    def monomial(cls, dims, mono: Mono, c=1) -> "CohClass":
        return cls(dims, {tuple(mono): c})

    def __add__(self, other: "CohClass") -> "CohClass":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return CohClass(self.dims, out)

    def __mul__(self, other):
        if not isinstance(other, CohClass):
            return CohClass(self.dims, {m: c * other for m, c in self.terms.items()})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return CohClass(self.dims, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, CohClass) and self.dims == other.dims and self.terms == other.terms

    def __hash__(self):
        return hash((self.dims, frozenset(self.terms.items())))

    def homogeneous(self, k: int) -> "CohClass":
        """Part of complex degree k."""
        return CohClass(self.dims, {m: c for m, c in self.terms.items() if sum(m) == k})

    def degrees(self) -> set[int]:
        """Real cohomological degrees present."""
        return {2 * sum(m) for m in self.terms}

    def integrate(self) -> Fraction:
        return self.terms.get(self.dims, Fraction(0))

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{mono_str(m)}" for m, c in sorted(self.terms.items()))

    __repr__ = __str__


def mono_str(m: Mono) -> str:
    parts = [f"h{f + 1}" if a == 1 else f"h{f + 1}^{a}" for f, a in enumerate(m) if a]
    return " ".join(parts) if parts else "1"


def mono_parse(text: str, nfactors: int) -> Mono:
    text = text.strip()
    out = [0] * nfactors
    if text == "1":
        return tuple(out)
    for tok in text.split():
        m = re.fullmatch(r"h(\d+)(?:\^(\d+))?", tok)
        if not m:
            raise ParseError(f"bad cohomology factor {tok!r}")
        f = int(m.group(1)) - 1
        if not 0 <= f < nfactors:
            raise ParseError(f"factor index out of range in {tok!r}")
        out[f] += int(m.group(2) or 1)
    return tuple(out)


# --------------------------------------------------------------------------
# Kunneth diagonal

def kunneth_diagonal(X: ToricThreefold | Sequence[int]) -> list[tuple[CohClass, CohClass]]:
    """``delta_* 1 = sum_i u_i (x) v_i``; for ``P^n`` the terms are ``h^i (x) h^{n-i}``."""
    dims = _dims(X)
    terms: list[tuple[Mono, Mono]] = [((), ())]
    for n in dims:
        terms = [(u + (i,), v + (n - i,)) for u, v in terms for i in range(n + 1)]
    return [(CohClass.monomial(dims, u), CohClass.monomial(dims, v)) for u, v in terms]


def diagonal_of(gamma: CohClass) -> list[tuple[CohClass, CohClass]]:
    """``delta_* gamma = sum (gamma u_i) (x) v_i``."""
    out = []
    for u, v in kunneth_diagonal(gamma.dims):
        gu = gamma * u
        if gu.terms:
            out.append((gu, v))
    return out


# --------------------------------------------------------------------------
# Todd class

def _todd_series(N: int) -> list[Fraction]:
    """Coefficients of ``x / (1 - e^{-x})`` through ``x^N``."""
    a = [Fraction((-1) ** k, factorial(k + 1)) for k in range(N + 1)]  # (1 - e^{-x})/x
    b = [Fraction(0)] * (N + 1)
    b[0] = 1 / a[0]
    for n in range(1, N + 1):
        b[n] = -sum((a[k] * b[n - k] for k in range(1, n + 1)), Fraction(0)) / a[0]
    return b


def todd_class(X: ToricThreefold | Sequence[int]) -> CohClass:
    """``Td(X) = prod_f (h_f / (1 - e^{-h_f}))^{n_f + 1}``."""
    dims = _dims(X)
    total = CohClass.one(dims)
    for f, n in enumerate(dims):
        series = _todd_series(n)
        factor = CohClass(dims, {tuple(k if g == f else 0 for g in range(len(dims))): c for k, c in enumerate(series)})
        for _ in range(n + 1):
            total = total * factor
    return total


# --------------------------------------------------------------------------
# expressions

@dataclass(frozen=True)
class Tau:
    """``tau_i(h^mono)`` or, with ``j`` set, ``tau_{i,j}(h^mono)``."""

    i: int
    j: int | None
    mono: Mono

    def is_generalized(self) -> bool:
        return self.j is not None

    def key(self):
        return (self.j is not None, self.i, -1 if self.j is None else self.j, self.mono)

    def real_degree(self) -> int:
        """Cohomological degree on the moduli space (the 3-fold dimension is 3)."""
        if self.j is None:
            return 2 * self.i + 4 + 2 * sum(self.mono) - 6
        return 2 * self.i + 2 * self.j + 8 + 2 * sum(self.mono) - 6

    def __str__(self):
        idx = f"{self.i}" if self.j is None else f"{self.i},{self.j}"
        return f"tau[{idx}]({mono_str(self.mono)})"


Term = tuple[Tau, ...]


class DescendentExpr:
    """Q-linear combination of products of descendent symbols."""

    __slots__ = ("dims", "terms")

    def __init__(self, dims: Sequence[int], terms: Mapping[Term, Fraction | int] | None = None):
        self.dims = tuple(dims)
        out: dict[Term, Fraction] = {}
        for t, c in (terms or {}).items():
            t = tuple(sorted((_canonical(x) for x in t), key=Tau.key))
            out[t] = out.get(t, 0) + Fraction(c)
        self.terms = {t: c for t, c in out.items() if c != 0}

    def __add__(self, other: "DescendentExpr") -> "DescendentExpr":
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, 0) + c
        return DescendentExpr(self.dims, out)

    def scale(self, a) -> "DescendentExpr":
        return DescendentExpr(self.dims, {t: a * c for t, c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, DescendentExpr) and self.dims == other.dims and self.terms == other.terms

    def has_generalized(self) -> bool:
        return any(x.is_generalized() for t in self.terms for x in t)

    def degrees(self) -> set[int]:
        return {sum(x.real_degree() for x in t) for t in self.terms}

    def to_text(self) -> str:
        lines = []
        for t, c in sorted(self.terms.items(), key=_term_key):
            lines.append(" * ".join([str(c)] + [str(x) for x in t]))
        return "\n".join(lines)

    __str__ = to_text

    def to_json(self) -> list:
        return [
            {"coefficient": str(c), "factors": [{"i": x.i, "j": x.j, "gamma": list(x.mono)} for x in t]}
            for t, c in sorted(self.terms.items(), key=_term_key)
        ]


def _term_key(kv):
    return (len(kv[0]), [x.key() for x in kv[0]])


def _canonical(x: Tau) -> Tau:
    if x.j is not None and x.j < x.i:
        return Tau(x.j, x.i, x.mono)
    return x


_TAU = re.compile(r"tau\[(-?\d+)(?:,(-?\d+))?\]\(([^)]*)\)")


def parse_expr(text: str, dims: Sequence[int]) -> DescendentExpr:
    """Inverse of ``DescendentExpr.to_text``."""
    dims = tuple(dims)
    terms: dict[Term, Fraction] = {}
    for line in text.strip().splitlines():
        line = line.strip()
        if not line:
            continue
        head, _, rest = line.partition(" * ")
        try:
            coeff = Fraction(head)
        except ValueError as exc:
            raise ParseError(f"bad coefficient in {line!r}") from exc
        factors = []
        pos = 0
        for piece in rest.split(" * "):
            m = _TAU.fullmatch(piece.strip())
            if not m:
                raise ParseError(f"bad descendent symbol {piece!r}")
            j = int(m.group(2)) if m.group(2) is not None else None
            factors.append(Tau(int(m.group(1)), j, mono_parse(m.group(3), len(dims))))
            pos += 1
        if not pos:
            raise ParseError(f"term without symbols: {line!r}")
        key = tuple(factors)
        terms[key] = terms.get(key, 0) + coeff
    return DescendentExpr(dims, terms)


# --------------------------------------------------------------------------
# GRR

@dataclass(frozen=True)
class GrrTerm:
    """``a * pi_*(ch_i(F) ch_j(F) gamma)``; ``j = 0`` stands for the unit (a single ch factor)."""

    a: Fraction
    i: int
    j: int
    gamma: Mono

    def real_degree(self) -> int:
        return 2 * self.i + 2 * self.j + 2 * sum(self.gamma)

    def to_tau(self) -> Term:
        if self.j == 0:
            return (Tau(self.i - 2, None, self.gamma),)
        return (Tau(self.i - 2, self.j - 2, self.gamma),)


def grr_terms(X: ToricThreefold | Sequence[int], k: int) -> list[GrrTerm]:
    """Unsymmetrized terms of the degree-k part of ``pi_*(ch(I) ch(I^v) Td(X))`` minus the pure Td part."""
    if k < 1:
        raise ValueError("k must be positive")
    dims = _dims(X)
    dim = sum(dims)
    td = todd_class(dims)
    top = k + dim  # complex degree on P x X before pushforward
    out: list[GrrTerm] = []
    # ch_i(F) vanishes for i < 2 (F is supported in codimension 2)
    for i in range(2, top + 1):
        for mono, c in sorted(td.homogeneous(top - i).terms.items()):
            # -ch(F) . 1 and 1 . (-ch(F^v))
            out.append(GrrTerm(-c * (1 + (-1) ** i), i, 0, mono))
        for j in range(2, top - i + 1):
            for mono, c in sorted(td.homogeneous(top - i - j).terms.items()):
                out.append(GrrTerm(c * (-1) ** j, i, j, mono))
    return [t for t in out if t.a != 0]


def grr_expansion(X: ToricThreefold | Sequence[int], k: int) -> DescendentExpr:
    """``ch_k(-T^vir)`` in generalized descendents ``tau_{i,j}`` and descendents ``tau_i``."""
    dims = _dims(X)
    terms: dict[Term, Fraction] = {}
    for t in grr_terms(dims, k):
        key = t.to_tau()
        terms[key] = terms.get(key, 0) + t.a
    return DescendentExpr(dims, terms)


def reduce_generalized(e: DescendentExpr, X: ToricThreefold | Sequence[int] | None = None) -> DescendentExpr:
    """Replace each ``tau_{i,j}(gamma)`` by ``sum tau_i(u) tau_j(v)`` over ``delta_* gamma``."""
    dims = _dims(X) if X is not None else e.dims
    if dims != e.dims:
        raise UnsupportedSpace(f"expression lives on {e.dims}, not {dims}")
    out: dict[Term, Fraction] = {}
    for t, c in e.terms.items():
        expansions: list[tuple[list[Tau], Fraction]] = [([], c)]
        for x in t:
            if not x.is_generalized():
                expansions = [(fs + [x], a) for fs, a in expansions]
                continue
            gamma = CohClass.monomial(dims, x.mono)
            nxt = []
            for fs, a in expansions:
                for u, v in diagonal_of(gamma):
                    for mu, cu in u.terms.items():
                        for mv, cv in v.terms.items():
                            nxt.append((fs + [Tau(x.i, None, mu), Tau(x.j, None, mv)], a * cu * cv))
            expansions = nxt
        for fs, a in expansions:
            key = tuple(sorted(fs, key=Tau.key))
            out[key] = out.get(key, 0) + a
    return DescendentExpr(dims, out)


def expr_from_terms(dims: Sequence[int], items: Iterable[tuple[Fraction | int, Term]]) -> DescendentExpr:
    terms: dict[Term, Fraction] = {}
    for c, t in items:
        terms[tuple(t)] = terms.get(tuple(t), 0) + Fraction(c)
    return DescendentExpr(dims, terms)
