"""Exact arithmetic kernel.

Laurent polynomials in the three torus characters t1, t2, t3 with rational
coefficients, and *character fractions* ``N / prod_v (1 - t^v)`` as they
appear in two-point localization before cancellation.

A weight ``w = (w1, w2, w3)`` stands for the monomial ``t^w`` and for the
linear form ``w1*s1 + w2*s2 + w3*s3``.  Coefficients are Python ``int`` or
``fractions.Fraction``; both are exact and compare/hash consistently.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DegenerateFunctional, NotPolynomial

Weight = tuple[int, int, int]
Rat = Fraction

ZERO_WEIGHT: Weight = (0, 0, 0)

# Orients denominator factors.  phi(v) == 0 forces |v_i| >~ 500 for some i,
# far outside any weight that occurs for the catalog geometries.
GENERIC_FUNCTIONAL: Weight = (1, 1009, 1009 * 1009)


def wadd(a: Sequence[int], b: Sequence[int]) -> Weight:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def wsub(a: Sequence[int], b: Sequence[int]) -> Weight:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def wneg(a: Sequence[int]) -> Weight:
    return (-a[0], -a[1], -a[2])


def wscale(k: int, a: Sequence[int]) -> Weight:
    return (k * a[0], k * a[1], k * a[2])


def pairing(phi: Sequence[int], w: Sequence[int]) -> int:
    return phi[0] * w[0] + phi[1] * w[1] + phi[2] * w[2]


def _clean(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class LaurentPoly:
    """Finitely supported map ``Weight -> Rat``; immutable."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Weight, Rational] | Iterable[tuple[Weight, Rational]] | None = None):
        acc: dict[Weight, Rational] = {}
        if terms is not None:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for w, c in items:
                w = (int(w[0]), int(w[1]), int(w[2]))
                acc[w] = acc.get(w, 0) + c
        self._terms = {w: _clean(c) for w, c in acc.items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict[Weight, Rational]) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, w: Sequence[int], c: Rational = 1) -> "LaurentPoly":
        return cls({tuple(w): c})

    @classmethod
    def constant(cls, c: Rational) -> "LaurentPoly":
        return cls({ZERO_WEIGHT: c})

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls._raw({})

    @classmethod
    def one(cls) -> "LaurentPoly":
        return cls._raw({ZERO_WEIGHT: 1})

    # -- inspection -------------------------------------------------------
    def items(self) -> Iterator[tuple[Weight, Rational]]:
        return iter(self._terms.items())

    def sorted_items(self) -> list[tuple[Weight, Rational]]:
        return sorted(self._terms.items())

    def support(self) -> frozenset[Weight]:
        return frozenset(self._terms)

    def coeff(self, w: Sequence[int]) -> Rational:
        return self._terms.get(tuple(w), 0)

    def rank(self) -> Rational:
        """Sum of coefficients (value at t = 1)."""
        return _clean(sum(self._terms.values(), 0))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- ring structure ---------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            if isinstance(other, Rational):
                other = LaurentPoly.constant(other)
            else:
                return NotImplemented
        out = dict(self._terms)
        for w, c in other._terms.items():
            v = out.get(w, 0) + c
            if v == 0:
                out.pop(w, None)
            else:
                out[w] = _clean(v)
        return LaurentPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, Rational):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Rational):
            if other == 0:
                return LaurentPoly.zero()
            return LaurentPoly._raw({w: _clean(c * other) for w, c in self._terms.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        out: dict[Weight, Rational] = defaultdict(int)
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                out[(w1[0] + w2[0], w1[1] + w2[1], w1[2] + w2[2])] += c1 * c2
        return LaurentPoly._raw({w: _clean(c) for w, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not Laurent polynomials in general")
        out = LaurentPoly.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, w: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial ``t^w``."""
        return LaurentPoly._raw({wadd(v, w): c for v, c in self._terms.items()})

    def bar(self) -> "LaurentPoly":
        """Dual character: ``t^w -> t^{-w}``."""
        return LaurentPoly._raw({wneg(w): c for w, c in self._terms.items()})

    def map_weights(self, f) -> "LaurentPoly":
        return LaurentPoly((f(w), c) for w, c in self._terms.items())

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Rational):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "LaurentPoly(0)"
        parts = [f"{c}*t^{w}" for w, c in self.sorted_items()]
        return "LaurentPoly(" + " + ".join(parts) + ")"


def _orient(v: Sequence[int], phi: Sequence[int]) -> int:
    p = pairing(phi, v)
    if p == 0:
        raise DegenerateFunctional(f"functional {tuple(phi)} vanishes on denominator weight {tuple(v)}")
    return 1 if p > 0 else -1


class CharFraction:
    """``numerator / prod_v (1 - t^v)`` with every ``v`` nonzero.

    Denominator factors are stored oriented so that ``GENERIC_FUNCTIONAL``
    is positive on each weight; construction rewrites
    ``1/(1 - t^v) = -t^{-v} / (1 - t^{-v})`` where needed, so the stored
    representation always denotes the same element of the fraction field.
    """

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: LaurentPoly | Rational, denominator: Iterable[Sequence[int]] = ()):
        if not isinstance(numerator, LaurentPoly):
            numerator = LaurentPoly.constant(numerator)
        den: list[Weight] = []
        num = numerator
        for v in denominator:
            v = (int(v[0]), int(v[1]), int(v[2]))
            if v == ZERO_WEIGHT:
                raise ValueError("zero weight in denominator")
            if _orient(v, GENERIC_FUNCTIONAL) < 0:
                v = wneg(v)
                num = num.shift(v) * -1
            den.append(v)
        self.numerator = num
        self.denominator: tuple[Weight, ...] = tuple(sorted(den))

    @classmethod
    def from_poly(cls, p: LaurentPoly) -> "CharFraction":
        return cls(p, ())

    def _den_counts(self) -> dict[Weight, int]:
        counts: dict[Weight, int] = defaultdict(int)
        for v in self.denominator:
            counts[v] += 1
        return counts

    def __add__(self, other):
        if isinstance(other, LaurentPoly) or isinstance(other, Rational):
            other = CharFraction(other)
        if not isinstance(other, CharFraction):
            return NotImplemented
        return cf_combine(self, other)

    __radd__ = __add__

    def __neg__(self):
        f = CharFraction.__new__(CharFraction)
        f.numerator = -self.numerator
        f.denominator = self.denominator
        return f

    def __sub__(self, other):
        if isinstance(other, LaurentPoly) or isinstance(other, Rational):
            other = CharFraction(other)
        return cf_combine(self, -other)

    def __mul__(self, other):
        if isinstance(other, (LaurentPoly, Rational)):
            f = CharFraction.__new__(CharFraction)
            f.numerator = self.numerator * other
            f.denominator = self.denominator
            return f
        if not isinstance(other, CharFraction):
            return NotImplemented
        f = CharFraction.__new__(CharFraction)
        f.numerator = self.numerator * other.numerator
        f.denominator = tuple(sorted(self.denominator + other.denominator))
        return f

    __rmul__ = __mul__

    def shift(self, w: Sequence[int]) -> "CharFraction":
        return self * LaurentPoly.monomial(w)

    def bar(self) -> "CharFraction":
        """Dual character; the denominator weights get negated and re-oriented."""
        return CharFraction(self.numerator.bar(), [wneg(v) for v in self.denominator])

    def normalize(self) -> LaurentPoly:
        return cf_normalize(self)

    def __repr__(self):
        return f"CharFraction({self.numerator!r} / {list(self.denominator)})"


def cf_combine(a: CharFraction, b: CharFraction) -> CharFraction:
    """``a + b`` over the least common multiple of the two denominators."""
    ca, cb = a._den_counts(), b._den_counts()
    lcm = {v: max(ca.get(v, 0), cb.get(v, 0)) for v in set(ca) | set(cb)}

    def lift(f: CharFraction, counts: dict[Weight, int]) -> LaurentPoly:
        num = f.numerator
        for v, k in lcm.items():
            for _ in range(k - counts.get(v, 0)):
                num = num - num.shift(v)
        return num

    out = CharFraction.__new__(CharFraction)
    out.numerator = lift(a, ca) + lift(b, cb)
    out.denominator = tuple(sorted(v for v, k in lcm.items() for _ in range(k)))
    return out


def cf_sum(fractions: Iterable[CharFraction]) -> CharFraction:
    total = CharFraction(LaurentPoly.zero())
    for f in fractions:
        total = cf_combine(total, f)
    return total


def _line_key(w: Weight, v: Weight) -> tuple[Weight, int]:
    """Split ``w = base + k*v`` with a canonical coset representative ``base``."""
    i = 0 if v[0] != 0 else (1 if v[1] != 0 else 2)
    k = w[i] // v[i]
    return wsub(w, wscale(k, v)), k


def divide_one_minus(p: LaurentPoly, v: Sequence[int]) -> LaurentPoly:
    """Exact quotient ``p / (1 - t^v)``; raises NotPolynomial on a remainder.

    On each line ``base + Z*v`` the quotient coefficients are the partial sums
    of ``p``'s coefficients, and divisibility means every line sums to zero.
    """
    v = tuple(v)
    lines: dict[Weight, list[tuple[int, Rational]]] = defaultdict(list)
    for w, c in p.items():
        base, k = _line_key(w, v)
        lines[base].append((k, c))
    out: dict[Weight, Rational] = {}
    for base, terms in lines.items():
        terms.sort()
        running = 0
        for idx, (k, c) in enumerate(terms):
            running += c
            nxt = terms[idx + 1][0] if idx + 1 < len(terms) else None
            if nxt is None:
                if running != 0:
                    raise NotPolynomial(f"numerator not divisible by (1 - t^{v})")
                break
            if running != 0:
                for j in range(k, nxt):
                    out[wadd(base, wscale(j, v))] = _clean(running)
    return LaurentPoly._raw(out)


def cf_normalize(f: CharFraction) -> LaurentPoly:
    """Exact quotient of a character fraction, by iterated single-factor division."""
    num = f.numerator
    for v in f.denominator:
        num = divide_one_minus(num, v)
    return num


def series_oracle(f: CharFraction, window: tuple[int, int], phi: Sequence[int]) -> LaurentPoly:
    """Expand ``f`` as a formal series along ``phi`` and keep terms with phi-value in ``window``.

    Independent of :func:`cf_normalize`: every factor ``1/(1-t^v)`` is
    replaced by its geometric series in the direction where ``phi`` grows.
    """
    lo, hi = window
    phi = tuple(phi)
    steps: list[tuple[Weight, int, int]] = []  # (step weight, sign, first exponent)
    for v in f.denominator:
        if _orient(v, phi) > 0:
            steps.append((tuple(v), 1, 0))
        else:
            # 1/(1-t^v) = -t^{-v} / (1 - t^{-v}) = -sum_{k>=1} t^{-k v}
            steps.append((wneg(v), -1, 1))
    mins = [pairing(phi, s) * first for s, _, first in steps]
    current: dict[Weight, Rational] = dict(f.numerator.items())
    for idx, (step, sign, first) in enumerate(steps):
        rest_min = sum(mins[idx + 1:])
        cutoff = hi - rest_min
        dphi = pairing(phi, step)
        nxt: dict[Weight, Rational] = defaultdict(int)
        for w, c in current.items():
            k = first
            pw = pairing(phi, w) + k * dphi
            while pw <= cutoff:
                nxt[wadd(w, wscale(k, step))] += sign * c
                k += 1
                pw += dphi
        current = {w: c for w, c in nxt.items() if c != 0}
    return LaurentPoly((w, c) for w, c in current.items() if lo <= pairing(phi, w) <= hi)
