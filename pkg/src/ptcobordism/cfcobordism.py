"""Inverse Todd operators, Conner-Floyd classes and cobordism classes over a point.

``Td_t^{-1}(L) = sum_i c_1(L)^i t_i`` (with ``t_0 = 1``) extends multiplicatively.
Writing ``log(1 + sum_i x^i t_i) = sum_m x^m g_m(t)`` gives, for any K-class V,

    Td_t^{-1}(V) = exp( sum_m p_m(V) g_m(t) )

with ``p_m`` the Chern-root power sums, which is additive in V.  That is how
negative classes and generic bundles are expanded here.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .chernloc import ChernIndex, bott_chern_numbers, chern_indices, index_degree, normalize_index
from .errors import IncompleteVector
from .linalg import inverse, matvec
from .toric3 import ToricThreefold

Monomial = tuple[tuple[str, int], ...]


def _var_key(name: str):
    head = name.rstrip("0123456789")
    tail = name[len(head):]
    return (head, int(tail) if tail else -1)


class SymPoly:
    """Sparse polynomial over Q in named commuting variables."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Fraction | int] | None = None):
        self.terms = {m: Fraction(c) for m, c in (terms or {}).items() if c != 0}

    @classmethod
    def const(cls, c) -> "SymPoly":
        return cls({(): c})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "SymPoly":
        return cls({((name, power),): 1} if power else {(): 1})

    @staticmethod
    def _lift(x) -> "SymPoly":
        return x if isinstance(x, SymPoly) else SymPoly.const(x)

    @staticmethod
    def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
        out = dict(a)
        for v, e in b:
            out[v] = out.get(v, 0) + e
        return tuple(sorted(out.items(), key=lambda kv: _var_key(kv[0])))

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return SymPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return SymPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = self._mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return SymPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = SymPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, SymPoly):
            other = SymPoly.const(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def coeff(self, mono: Monomial | Mapping[str, int]) -> Fraction:
        if isinstance(mono, Mapping):
            mono = tuple(sorted(((v, e) for v, e in mono.items() if e), key=lambda kv: _var_key(kv[0])))
        return self.terms.get(tuple(mono), Fraction(0))

    def substitute(self, values: Mapping[str, "SymPoly | Fraction | int"]) -> "SymPoly":
        out = SymPoly()
        for m, c in self.terms.items():
            term = SymPoly.const(c)
            for v, e in m:
                term = term * (self._lift(values[v]) ** e if v in values else SymPoly.var(v, e))
            out = out + term
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda kv: [(_var_key(v), e) for v, e in kv[0]]):
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


# --------------------------------------------------------------------------
# t-polynomials

class TPolynomial:
    """Finite map from multi-index I (exponents of t_1, t_2, ...) to a coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Sequence[int], object] | None = None):
        out: dict[ChernIndex, object] = {}
        for idx, c in (terms or {}).items():
            key = normalize_index(idx)
            out[key] = out.get(key, 0) + c
        self.terms = {k: c for k, c in out.items() if c != 0}

    @classmethod
    def one(cls) -> "TPolynomial":
        return cls({(): 1})

    @classmethod
    def t(cls, i: int) -> "TPolynomial":
        idx = [0] * i
        idx[i - 1] = 1
        return cls({tuple(idx): 1})

    def coeff(self, idx: Sequence[int]):
        return self.terms.get(normalize_index(idx), 0)

    def homogeneous(self, d: int) -> "TPolynomial":
        return TPolynomial({k: c for k, c in self.terms.items() if index_degree(k) == d})

    def truncate(self, D: int) -> "TPolynomial":
        return TPolynomial({k: c for k, c in self.terms.items() if index_degree(k) <= D})

    def __add__(self, other: "TPolynomial") -> "TPolynomial":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return TPolynomial(out)

    def __neg__(self):
        return TPolynomial({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TPolynomial":
        return TPolynomial({k: c * v for k, v in self.terms.items()})

    def mul(self, other: "TPolynomial", D: int | None = None) -> "TPolynomial":
        out: dict[ChernIndex, object] = {}
        for k1, c1 in self.terms.items():
            d1 = index_degree(k1)
            for k2, c2 in other.terms.items():
                if D is not None and d1 + index_degree(k2) > D:
                    continue
                n = max(len(k1), len(k2))
                k = tuple((k1[i] if i < len(k1) else 0) + (k2[i] if i < len(k2) else 0) for i in range(n))
                out[k] = out.get(k, 0) + c1 * c2
        return TPolynomial(out)

    __mul__ = mul

    def __eq__(self, other):
        return isinstance(other, TPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted((k, str(c)) for k, c in self.terms.items())))

    def degree_parts(self) -> dict[int, "TPolynomial"]:
        return {d: self.homogeneous(d) for d in sorted({index_degree(k) for k in self.terms})}

    def to_json(self) -> list:
        return [
            {"I": list(k), "coefficient": str(c)}
            for k, c in sorted(self.terms.items(), key=lambda kv: (index_degree(kv[0]), kv[0]))
        ]

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, c in sorted(self.terms.items(), key=lambda kv: (index_degree(kv[0]), kv[0])):
            mono = "*".join(f"t{i + 1}" if e == 1 else f"t{i + 1}^{e}" for i, e in enumerate(k) if e)
            coef = f"({c})" if isinstance(c, SymPoly) and len(c.terms) > 1 else str(c)
            parts.append(coef if not mono else (mono if coef == "1" else f"{coef}*{mono}"))
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__


def _log_series(D: int) -> TPolynomial:
    """``log(1 + t_1 + t_2 + ... + t_D)`` truncated at weighted degree D."""
    u = TPolynomial({tuple([0] * (i - 1) + [1]): 1 for i in range(1, D + 1)})
    acc = TPolynomial()
    power = TPolynomial.one()
    for k in range(1, D + 1):
        power = power.mul(u, D)
        acc = acc + power.scale(Fraction((-1) ** (k + 1), k))
    return acc


def _exp_series(a: TPolynomial, D: int) -> TPolynomial:
    """``exp(a)`` for ``a`` without constant term, truncated at weighted degree D."""
    acc = TPolynomial.one()
    power = TPolynomial.one()
    for k in range(1, D + 1):
        power = power.mul(a, D).scale(Fraction(1, k))
        acc = acc + power
    return acc


_LOG_CACHE: dict[int, dict[int, TPolynomial]] = {}


def _g(D: int) -> dict[int, TPolynomial]:
    if D not in _LOG_CACHE:
        log = _log_series(D)
        _LOG_CACHE[D] = {m: log.homogeneous(m) for m in range(1, D + 1)}
    return _LOG_CACHE[D]


# --------------------------------------------------------------------------
# formal bundles

@dataclass(frozen=True)
class FormalBundle:
    """A K-class: signed line bundles (by Chern root) plus signed generic bundles.

    A generic bundle with prefix ``c`` has Chern classes ``c1, c2, ...``.
    """

    roots: tuple[tuple[str, int], ...] = ()
    generic: tuple[tuple[str, int], ...] = ()

    @classmethod
    def line(cls, root: str = "x") -> "FormalBundle":
        return cls(roots=((root, 1),))

    @classmethod
    def vector_bundle(cls, prefix: str = "c") -> "FormalBundle":
        return cls(generic=((prefix, 1),))

    @classmethod
    def split(cls, roots: Sequence[str]) -> "FormalBundle":
        return cls(roots=tuple((r, 1) for r in roots))

    def __add__(self, other: "FormalBundle") -> "FormalBundle":
        return FormalBundle(self.roots + other.roots, self.generic + other.generic)

    def __neg__(self) -> "FormalBundle":
        return FormalBundle(tuple((r, -s) for r, s in self.roots), tuple((p, -s) for p, s in self.generic))

    def __sub__(self, other):
        return self + (-other)

    def power_sum(self, m: int) -> SymPoly:
        total = SymPoly()
        for r, s in self.roots:
            total = total + SymPoly.var(r, m) * s
        for prefix, s in self.generic:
            total = total + newton_power_sum(prefix, m) * s
        return total


_NEWTON: dict[tuple[str, int], SymPoly] = {}


def newton_power_sum(prefix: str, m: int) -> SymPoly:
    """``p_m`` in terms of elementary symmetric functions ``{prefix}1, {prefix}2, ...``."""
    key = (prefix, m)
    if key not in _NEWTON:
        e = lambda i: SymPoly.var(f"{prefix}{i}")  # noqa: E731
        acc = e(m) * ((-1) ** (m - 1) * m)
        for i in range(1, m):
            acc = acc + e(i) * newton_power_sum(prefix, m - i) * ((-1) ** (i - 1))
        _NEWTON[key] = acc
    return _NEWTON[key]


def todd_inverse_expansion(V: FormalBundle, D: int) -> TPolynomial:
    """``Td_t^{-1}(V)`` through weighted degree D; the ``t^I`` coefficient is ``c_I(V)``."""
    if D < 0:
        raise ValueError("D must be nonnegative")
    g = _g(D)
    a = TPolynomial()
    for m in range(1, D + 1):
        p = V.power_sum(m)
        if p != 0:
            a = a + g[m].scale(p)
    return _exp_series(a, D)


def monomial_of(index: Sequence[int], prefix: str = "c") -> Monomial:
    return tuple((f"{prefix}{k + 1}", e) for k, e in enumerate(normalize_index(index)) if e)


_BASIS: dict[int, list[list[Fraction]]] = {}


def cf_basis_matrix(d: int) -> list[list[Fraction]]:
    """``M[I][J]`` = coefficient of ``prod_k c_k(V)^{j_k}`` in ``c_I(-V)``; rows and columns follow ``chern_indices(d)``."""
    if d < 1:
        raise ValueError("d must be at least 1")
    if d not in _BASIS:
        expansion = todd_inverse_expansion(-FormalBundle.vector_bundle("c"), d)
        idx = chern_indices(d)
        rows = []
        for I in idx:
            cI = SymPoly._lift(expansion.coeff(I))
            rows.append([cI.coeff(monomial_of(J)) for J in idx])
        inverse(rows)  # raises SingularMatrix on an expansion bug
        _BASIS[d] = rows
    return [row[:] for row in _BASIS[d]]


def _check_complete(v: Mapping[Sequence[int], object], d: int) -> list[ChernIndex]:
    idx = chern_indices(d)
    given = {normalize_index(k) for k in v}
    missing = [I for I in idx if I not in given]
    if missing:
        raise IncompleteVector(f"missing Chern numbers for {missing}")
    extra = given - set(idx)
    if extra:
        raise IncompleteVector(f"indices {sorted(extra)} do not have weighted degree {d}")
    return idx


def cobordism_class_point(v: Mapping[Sequence[int], object], d: int) -> TPolynomial:
    """Chern numbers ``int prod c_k(V)^{i_k}`` to ``sum_I (int c_I(-V)) t^I``."""
    vv = {normalize_index(k): Fraction(c) for k, c in v.items()}
    idx = _check_complete(vv, d)
    if d == 0:
        return TPolynomial({(): vv[()]})
    values = matvec(cf_basis_matrix(d), [vv[J] for J in idx])
    return TPolynomial(dict(zip(idx, values)))


def chern_vector_from_class(t: TPolynomial, d: int) -> dict[ChernIndex, Fraction]:
    """Inverse of ``cobordism_class_point``."""
    idx = chern_indices(d)
    if d == 0:
        return {(): Fraction(t.coeff(()))}
    vals = matvec(inverse(cf_basis_matrix(d)), [Fraction(t.coeff(I)) for I in idx])
    return dict(zip(idx, vals))


@dataclass(frozen=True)
class SmoothClass:
    chern_numbers: dict
    cls: TPolynomial

    def to_json(self) -> dict:
        return {
            "chern_numbers": [{"I": list(k), "value": str(v)} for k, v in self.chern_numbers.items()],
            "class": self.cls.to_json(),
        }


def smooth_variety_class(X: ToricThreefold, seed: int = 0, specializations: int = 2) -> SmoothClass:
    """``[X -> pt]`` from Bott-localized Chern numbers of the tangent bundle."""
    numbers = bott_chern_numbers(X, seed=seed, specializations=specializations)
    return SmoothClass(numbers, cobordism_class_point(numbers, 3))
