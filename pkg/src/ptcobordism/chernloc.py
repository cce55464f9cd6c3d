"""Chern numbers of T^vir by localization at isolated fixed pairs.

Each fixed pair contributes ``prod_k c_k(T)^{i_k} / e(T)`` where, for
``T = sum_w n_w t^w``, the total Chern class is ``prod_w (1 + l_w)^{n_w}``
and the Euler class ``prod_w l_w^{n_w}`` with ``l_w = w . s``.  The sum is a
degree-zero rational function of ``s`` that is in fact constant; it is
evaluated exactly at integer points ``s`` and the agreement of independent
points is enforced.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    DegenerateSpecialization,
    EngineUnavailable,
    SpecializationMismatch,
    ZeroWeightPresent,
)
from .exactalg import ZERO_WEIGHT, LaurentPoly, Weight
from .toric3 import ToricThreefold, virtual_dimension

ChernIndex = tuple[int, ...]

SPECIALIZATION_RANGE = 10**6
MAX_RETRIES = 16


def normalize_index(index: Sequence[int]) -> ChernIndex:
    idx = list(index)
    while idx and idx[-1] == 0:
        idx.pop()
    return tuple(idx)


def index_degree(index: Sequence[int]) -> int:
    return sum((k + 1) * i for k, i in enumerate(index))


def parse_index(text: str) -> ChernIndex:
    return normalize_index(int(x) for x in text.split(","))


def _partitions(d: int, largest: int | None = None) -> list[tuple[int, ...]]:
    if largest is None:
        largest = d
    if d == 0:
        return [()]
    out = []
    for first in range(min(d, largest), 0, -1):
        for rest in _partitions(d - first, first):
            out.append((first,) + rest)
    return out


def chern_indices(d: int) -> list[ChernIndex]:
    """All ``I`` with ``sum k i_k = d``, ordered lexicographically on the partitions (1^d first, (d) last)."""
    if d < 0:
        raise ValueError("d must be nonnegative")
    parts = sorted(_partitions(d))
    out = []
    for lam in parts:
        idx = [0] * d
        for part in lam:
            idx[part - 1] += 1
        out.append(normalize_index(idx))
    return out


# --------------------------------------------------------------------------
# symbolic Chern data

class GradedPoly:
    """Polynomial in s1, s2, s3 over Q, truncated above total degree ``top``."""

    __slots__ = ("terms", "top")

    def __init__(self, terms: dict[tuple[int, int, int], Fraction | int] | None = None, top: int = 0):
        self.top = top
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0 and sum(m) <= top}

    @classmethod
    def linear_form(cls, w: Weight, top: int) -> "GradedPoly":
        return cls({(1, 0, 0): w[0], (0, 1, 0): w[1], (0, 0, 1): w[2]}, top)

    def __add__(self, other: "GradedPoly") -> "GradedPoly":
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return GradedPoly(out, min(self.top, other.top))

    def __mul__(self, other):
        if not isinstance(other, GradedPoly):
            return GradedPoly({m: c * other for m, c in self.terms.items()}, self.top)
        top = min(self.top, other.top)
        out: dict = defaultdict(int)
        for m1, c1 in self.terms.items():
            d1 = sum(m1)
            for m2, c2 in other.terms.items():
                if d1 + sum(m2) <= top:
                    out[(m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2])] += c1 * c2
        return GradedPoly(dict(out), top)

    __rmul__ = __mul__

    def homogeneous(self, k: int) -> "GradedPoly":
        return GradedPoly({m: c for m, c in self.terms.items() if sum(m) == k}, self.top)

    def evaluate(self, s: Sequence) -> Fraction:
        total = Fraction(0)
        for (a, b, c), coef in self.terms.items():
            total += coef * Fraction(s[0]) ** a * Fraction(s[1]) ** b * Fraction(s[2]) ** c
        return total

    def __eq__(self, other):
        return isinstance(other, GradedPoly) and self.terms == other.terms

    def __repr__(self):
        return f"GradedPoly({self.terms}, top={self.top})"


def _one_plus_inverse(w: Weight, top: int) -> GradedPoly:
    """Truncated ``(1 + l_w)^{-1}``."""
    lw = GradedPoly.linear_form(w, top)
    acc = GradedPoly({(0, 0, 0): 1}, top)
    power = GradedPoly({(0, 0, 0): 1}, top)
    for k in range(1, top + 1):
        power = power * lw
        acc = acc + power * ((-1) ** k)
    return acc


def character_to_chern_data(char: LaurentPoly, d: int) -> tuple[list[GradedPoly], tuple[tuple[Weight, int], ...]]:
    """Graded pieces ``c_1..c_d`` of ``prod (1 + l_w)^{n_w}`` and the factored Euler class."""
    if char.coeff(ZERO_WEIGHT) != 0:
        raise ZeroWeightPresent("character has a trivial-weight summand")
    total = GradedPoly({(0, 0, 0): 1}, d)
    euler = []
    for w, n in char.sorted_items():
        if Fraction(n).denominator != 1:
            raise ValueError("character coefficients must be integers")
        n = int(n)
        factor = GradedPoly({(0, 0, 0): 1, **{m: c for m, c in GradedPoly.linear_form(w, d).terms.items()}}, d) if n > 0 else _one_plus_inverse(w, d)
        for _ in range(abs(n)):
            total = total * factor
        euler.append((w, n))
    return [total.homogeneous(k) for k in range(1, d + 1)], tuple(euler)


# --------------------------------------------------------------------------
# specializations

@dataclass(frozen=True)
class Specialization:
    s: tuple[int, int, int]
    seed: int

    def value(self, w: Sequence[int]) -> int:
        return w[0] * self.s[0] + w[1] * self.s[1] + w[2] * self.s[2]


def draw_specializations(seed: int, count: int, weights: Iterable[Weight]) -> list[Specialization]:
    """``count`` distinct generic integer points; generic = no weight of the run vanishes."""
    weights = [w for w in set(weights)]
    rng = random.Random(seed)
    out: list[Specialization] = []
    tries = 0
    while len(out) < count:
        s = tuple(rng.randint(-SPECIALIZATION_RANGE, SPECIALIZATION_RANGE) for _ in range(3))
        spec = Specialization(s, seed)
        if len(set(s)) == 3 and spec not in out and all(spec.value(w) != 0 for w in weights):
            out.append(spec)
            tries = 0
            continue
        tries += 1
        if tries > MAX_RETRIES:
            raise DegenerateSpecialization(f"no generic specialization after {MAX_RETRIES} draws (seed {seed})")
    return out


def pair_contributions(char: LaurentPoly, indices: Sequence[ChernIndex], spec: Specialization, d: int) -> list[Fraction]:
    """Localization contribution of one fixed pair, for each Chern index."""
    # c(T) at the specialization, as a polynomial in an auxiliary grading variable h
    c = [1] + [0] * d
    num_e, den_e = 1, 1
    for w, n in char.items():
        lw = spec.value(w)
        if lw == 0:
            raise DegenerateSpecialization(f"weight {w} vanishes at {spec.s}")
        if n > 0:
            num_e *= lw**n
            for _ in range(n):
                for k in range(d, 0, -1):
                    c[k] += lw * c[k - 1]
        else:
            den_e *= lw ** (-n)
            for _ in range(-n):
                # multiply by 1/(1 + lw h) = sum (-lw h)^k
                for k in range(1, d + 1):
                    c[k] -= lw * c[k - 1]
    out = []
    for idx in indices:
        top = 1
        for k, i in enumerate(idx):
            top *= c[k + 1] ** i
        out.append(Fraction(top * den_e, num_e))
    return out


# --------------------------------------------------------------------------
# engines

def localization_data(
    X: ToricThreefold, beta: Sequence[int], n: int, enable_ptvertex: bool = False
) -> list[tuple[tuple, LaurentPoly]]:
    """``(sort_key, T^vir character)`` for every isolated fixed pair, in canonical order."""
    from . import deg1engine

    if deg1engine.is_degree_one(X, beta):
        pairs = deg1engine.enumerate_deg1(X, beta, n)
        data = [(p.sort_key(), deg1engine.tvir_character_deg1(p)) for p in pairs]
    elif enable_ptvertex:
        from . import ptvertex

        pairs = ptvertex.enumerate_general(X, beta, n)
        data = [(p.sort_key(), ptvertex.general_character(p)) for p in pairs]
    else:
        raise EngineUnavailable(
            f"class {tuple(beta)} is not carried by a single invariant line; enable the ptvertex engine"
        )
    data.sort(key=lambda kv: kv[0])
    return data


def chern_numbers(
    X: ToricThreefold,
    beta: Sequence[int],
    n: int,
    indices: Sequence[ChernIndex] | None = None,
    seed: int = 0,
    specializations: int = 2,
    enable_ptvertex: bool = False,
) -> dict[ChernIndex, Fraction]:
    """``c_n^I`` for every requested ``I`` (default: all of ``chern_indices(d)``)."""
    if specializations < 2:
        raise ValueError("at least two specializations are required")
    d = virtual_dimension(X, beta)
    if indices is None:
        indices = chern_indices(d)
    indices = [normalize_index(i) for i in indices]
    for idx in indices:
        if index_degree(idx) != d:
            raise ValueError(f"Chern index {idx} does not have weighted degree {d}")
    if n <= 0:
        return {idx: Fraction(0) for idx in indices}
    data = localization_data(X, beta, n, enable_ptvertex)
    if not data:
        return {idx: Fraction(0) for idx in indices}
    weights = {w for _, char in data for w in char.support()}
    values = None
    for spec in draw_specializations(seed * 1000003 + n, specializations, weights):
        sums = [Fraction(0)] * len(indices)
        for _, char in data:
            for k, v in enumerate(pair_contributions(char, indices, spec, d)):
                sums[k] += v
        if values is None:
            values = sums
        elif sums != values:
            raise SpecializationMismatch(
                f"localization sum depends on the specialization for n={n}: {values} vs {sums} at {spec.s}"
            )
    return dict(zip(indices, values))


def chern_number(X: ToricThreefold, beta: Sequence[int], n: int, index: Sequence[int], **kw) -> Fraction:
    idx = normalize_index(index)
    return chern_numbers(X, beta, n, [idx], **kw)[idx]


def bott_chern_numbers(X: ToricThreefold, seed: int = 0, specializations: int = 2) -> dict[ChernIndex, Fraction]:
    """Chern numbers of the smooth 3-fold X by Bott's formula over its fixed points."""
    indices = chern_indices(3)
    data = [LaurentPoly((w, 1) for w in fp.tangent_weights) for fp in X.fixed_points]
    weights = {w for c in data for w in c.support()}
    values = None
    for spec in draw_specializations(seed, specializations, weights):
        sums = [Fraction(0)] * len(indices)
        for char in data:
            for k, v in enumerate(pair_contributions(char, indices, spec, 3)):
                sums[k] += v
        if values is None:
            values = sums
        elif sums != values:
            raise SpecializationMismatch(f"Bott localization is specialization dependent: {values} vs {sums}")
    return dict(zip(indices, values))
