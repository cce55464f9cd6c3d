"""Partition functions in q: assembly, exact rational reconstruction, and the checks
``f(1/q) = q^{-d} f(q)`` and "all f_I share their poles".

Univariate polynomials are tuples of Fractions in ascending degree.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .chernloc import ChernIndex, chern_indices, chern_numbers, normalize_index
from .errors import NoFit
from .linalg import solve
from .toric3 import ToricThreefold, virtual_dimension

Poly = tuple[Fraction, ...]


# --------------------------------------------------------------------------
# univariate polynomial helpers

def ptrim(p: Iterable) -> Poly:
    p = [Fraction(x) for x in p]
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def pdeg(p: Poly) -> int:
    return len(p) - 1


def padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return ptrim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def pneg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def psub(a: Poly, b: Poly) -> Poly:
    return padd(a, pneg(b))


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return ptrim(out)


def ppow(a: Poly, k: int) -> Poly:
    out: Poly = (Fraction(1),)
    for _ in range(k):
        out = pmul(out, a)
    return out


def pshift(a: Poly, k: int) -> Poly:
    """Multiply by q^k (k >= 0)."""
    return ptrim((Fraction(0),) * k + tuple(a)) if a else ()


def pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lead
        k = len(a) - len(b)
        q[k] = c
        for i, y in enumerate(b):
            a[k + i] -= c * y
        a = list(ptrim(a))
    return ptrim(q), ptrim(a)


def pgcd(a: Poly, b: Poly) -> Poly:
    a, b = ptrim(a), ptrim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    if not a:
        return ()
    return tuple(x / a[-1] for x in a)


def peval(a: Poly, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def preverse(a: Poly) -> Poly:
    return ptrim(reversed(a))


def porder(a: Poly) -> int:
    """Order of vanishing at q = 0."""
    for i, x in enumerate(a):
        if x != 0:
            return i
    raise ValueError("zero polynomial has no order")


def pstr(a: Poly, var: str = "q") -> str:
    if not a:
        return "0"
    parts = []
    for i, c in enumerate(a):
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        parts.append(("-" if c < 0 else "+", body))
    text = "".join(f" {s} {b}" for s, b in parts).strip()
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


# --------------------------------------------------------------------------
# rational functions

class RationalFn:
    """``num / den`` over Q, coprime, with the lowest nonzero coefficient of ``den`` equal to 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: Iterable, den: Iterable = (1,)):
        num, den = ptrim(num), ptrim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            self.num, self.den = (), (Fraction(1),)
            return
        g = pgcd(num, den)
        if pdeg(g) > 0:
            num, den = pdivmod(num, g)[0], pdivmod(den, g)[0]
        scale = den[porder(den)]
        self.num = tuple(x / scale for x in num)
        self.den = tuple(x / scale for x in den)

    @classmethod
    def from_factors(cls, scale, q_power: int, inner: Sequence, plus: int = 0, minus: int = 0) -> "RationalFn":
        """``scale * q^q_power * inner(q) / ((1+q)^plus (1-q)^minus)``; convenient for literal tables."""
        one = Fraction(1)
        num = pmul((Fraction(scale),), pshift(ptrim(inner), q_power))
        den = pmul(ppow((one, one), plus), ppow((one, -one), minus))
        return cls(num, den)

    def __eq__(self, other):
        return isinstance(other, RationalFn) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __call__(self, x):
        return peval(self.num, x) / peval(self.den, x)

    def series(self, n_min: int, count: int) -> list[Fraction]:
        """Coefficients of ``q^n`` for ``n_min <= n < n_min + count`` of the Laurent expansion at 0."""
        if not self.num:
            return [Fraction(0)] * count
        v = porder(self.den)
        d0 = self.den[v:]
        # num/d0 as a power series: a_k; f = q^{-v} sum a_k q^k
        need = n_min + v + count
        a: list[Fraction] = []
        for k in range(max(need, 0)):
            acc = self.num[k] if k < len(self.num) else Fraction(0)
            for j in range(1, min(k, len(d0) - 1) + 1):
                acc -= d0[j] * a[k - j]
            a.append(acc)
        return [a[n + v] if 0 <= n + v < len(a) else Fraction(0) for n in range(n_min, n_min + count)]

    def to_json(self) -> dict:
        return {"num": [str(x) for x in self.num], "den": [str(x) for x in self.den]}

    @classmethod
    def from_json(cls, doc: dict) -> "RationalFn":
        return cls([Fraction(x) for x in doc["num"]], [Fraction(x) for x in doc["den"]])

    def __str__(self):
        return f"({pstr(self.num)}) / ({pstr(self.den)})"

    def __repr__(self):
        return f"RationalFn({self})"


# --------------------------------------------------------------------------
# series assembly

@dataclass(frozen=True)
class CoeffSeries:
    n_min: int
    coeffs: tuple[Fraction, ...]
    geometry: str = ""
    beta: tuple[int, ...] = ()
    index: ChernIndex = ()
    d: int = 0

    @property
    def n_max(self) -> int:
        return self.n_min + len(self.coeffs) - 1

    def coefficient(self, n: int) -> Fraction:
        """Zero below the computed range."""
        if n < self.n_min:
            return Fraction(0)
        return self.coeffs[n - self.n_min]

    def to_json(self) -> dict:
        return {"n_min": self.n_min, "coefficients": [str(c) for c in self.coeffs]}


def _numbers_at(args):
    X, beta, n, indices, seed, specs, ptv = args
    return chern_numbers(X, beta, n, indices, seed=seed, specializations=specs, enable_ptvertex=ptv)


def assemble_all(
    X: ToricThreefold,
    beta: Sequence[int],
    n_max: int,
    indices: Sequence[ChernIndex] | None = None,
    seed: int = 0,
    specializations: int = 2,
    enable_ptvertex: bool = False,
    jobs: int = 1,
) -> dict[ChernIndex, CoeffSeries]:
    """``c_n^I`` for ``1 <= n <= n_max``, one series per Chern index."""
    beta = tuple(beta)
    d = virtual_dimension(X, beta)
    indices = [normalize_index(i) for i in (indices if indices is not None else chern_indices(d))]
    tasks = [(X, beta, n, indices, seed, specializations, enable_ptvertex) for n in range(1, n_max + 1)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_numbers_at, tasks))
    else:
        rows = [_numbers_at(t) for t in tasks]
    return {
        idx: CoeffSeries(1, tuple(row[idx] for row in rows), X.name, beta, idx, d)
        for idx in indices
    }


def assemble(X: ToricThreefold, beta: Sequence[int], index: Sequence[int], n_max: int, **kw) -> CoeffSeries:
    idx = normalize_index(index)
    return assemble_all(X, beta, n_max, [idx], **kw)[idx]


# --------------------------------------------------------------------------
# fitting

def _pade_candidate(g: Sequence[Fraction], m: int, k: int) -> tuple[Poly, Poly] | None:
    """Q = 1 + b1 q + ... + bm q^m with (Q g)_i = 0 for k < i <= k + m; returns (P, Q)."""
    def gi(i):
        return g[i] if 0 <= i < len(g) else Fraction(0)

    if m:
        rows = [[gi(i - j) for j in range(1, m + 1)] for i in range(k + 1, k + m + 1)]
        rhs = [-gi(i) for i in range(k + 1, k + m + 1)]
        b = solve(rows, rhs)
        if b is None:
            return None
    else:
        b = []
    Q = (Fraction(1),) + tuple(b)
    prod = [sum((Q[j] * gi(i - j) for j in range(len(Q))), Fraction(0)) for i in range(len(g))]
    if any(prod[i] != 0 for i in range(k + 1, len(g))):
        return None
    return ptrim(prod[: k + 1]), ptrim(Q)


def _ansatz_denominators(max_degree: int):
    one = Fraction(1)
    for total in range(max_degree + 1):
        for plus in range(total, -1, -1):
            minus = total - plus
            yield (plus, minus), pmul(ppow((one, one), plus), ppow((one, -one), minus))


def fit_rational(
    s: CoeffSeries | Sequence,
    mode: str = "pade",
    holdout: int = 2,
    max_den_degree: int | None = None,
    n_min: int | None = None,
) -> RationalFn:
    """Lowest-degree rational function reproducing every coefficient of ``s``.

    Degrees are minimized denominator first, then numerator.  The last
    ``holdout`` coefficients never enter the solve; they (and everything
    else) must be reproduced exactly or the candidate is rejected.
    """
    if holdout < 2:
        raise ValueError("holdout must be at least 2")
    if isinstance(s, CoeffSeries):
        data, start = list(s.coeffs), s.n_min
    else:
        data, start = [Fraction(x) for x in s], (n_min or 0)
    N = len(data)
    if N < holdout + 1:
        raise NoFit("series too short for any fit with the requested holdout")
    limit = N - 1 - holdout if max_den_degree is None else min(max_den_degree, N - 1 - holdout)
    found: tuple[Poly, Poly] | None = None
    if mode == "pade":
        for m in range(0, limit + 1):
            for k in range(0, N - holdout - m):
                cand = _pade_candidate(data, m, k)
                if cand is not None:
                    found = cand
                    break
            if found:
                break
    elif mode == "ansatz":
        for _, den in _ansatz_denominators(limit):
            prod = pmul(den, tuple(data))[:N]
            last = max((i for i, x in enumerate(prod) if x != 0), default=-1)
            if N - 1 - last >= holdout:
                found = (ptrim(prod[: last + 1]), den)
                break
    else:
        raise ValueError(f"unknown fit mode {mode!r}")
    if found is None:
        raise NoFit(f"no rational function within the degree bounds reproduces all {N} coefficients")
    P, Q = found
    if start >= 0:
        R = RationalFn(pshift(P, start), Q)
    else:
        R = RationalFn(P, pshift(Q, -start))
    if R.series(start, N) != data:
        raise NoFit("candidate fails exact re-expansion")
    return R


# --------------------------------------------------------------------------
# checks

@dataclass(frozen=True)
class FunctionalEquationResult:
    holds: bool
    residual: Poly

    def __bool__(self):
        return self.holds


def check_functional_equation(R: RationalFn, d: int) -> FunctionalEquationResult:
    """Decide ``R(1/q) == q^{-d} R(q)`` as an exact polynomial identity."""
    if not R.num:
        return FunctionalEquationResult(True, ())
    P, Q = R.num, R.den
    Prev, Qrev = preverse(P), preverse(Q)
    # R(1/q) = q^{deg Q - deg P} Prev/Qrev; clear denominators
    e = pdeg(Q) - pdeg(P) + d
    if e >= 0:
        residual = psub(pshift(pmul(Prev, Q), e), pmul(P, Qrev))
    else:
        residual = psub(pmul(Prev, Q), pshift(pmul(P, Qrev), -e))
    return FunctionalEquationResult(not residual, residual)


@dataclass
class PoleReport:
    same_support: bool
    same_multiplicities: bool
    factors: list[list[tuple[str, int]]] = field(default_factory=list)
    rational_poles: list[dict[str, int]] = field(default_factory=list)

    def __bool__(self):
        return self.same_support

    def to_json(self) -> dict:
        return {
            "same_support": self.same_support,
            "same_multiplicities": self.same_multiplicities,
            "factors": [[[f, m] for f, m in fs] for fs in self.factors],
            "rational_poles": self.rational_poles,
        }


def _factor_denominator(den: Poly) -> list[tuple[Poly, int]]:
    import sympy

    q = sympy.Symbol("q")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * q**i for i, c in enumerate(den))
    _, facs = sympy.factor_list(sympy.Poly(expr, q, domain="QQ"))
    out = []
    for f, mult in facs:
        coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(f.all_coeffs())]
        lead = coeffs[-1]
        out.append((tuple(c / lead for c in coeffs), int(mult)))
    out.sort()
    return out


def check_common_poles(fns: Sequence[RationalFn]) -> PoleReport:
    """Compare the irreducible factors of the denominators over Q."""
    if not fns:
        raise ValueError("need at least one function")
    per = [_factor_denominator(f.den) for f in fns]
    supports = [frozenset(p for p, _ in fs) for fs in per]
    mults = [dict(fs) for fs in per]
    rational = []
    for fs in per:
        roots = {}
        for p, m in fs:
            if len(p) == 2:
                roots[str(-p[0])] = m
        rational.append(roots)
    return PoleReport(
        same_support=all(s == supports[0] for s in supports),
        same_multiplicities=all(m == mults[0] for m in mults),
        factors=[[(pstr(p), m) for p, m in fs] for fs in per],
        rational_poles=rational,
    )


def fit_record(series: CoeffSeries, R: RationalFn | None, holdout: int) -> dict:
    rec = {
        "geometry": series.geometry,
        "beta": list(series.beta),
        "I": list(series.index),
        "d": series.d,
        "n_min": series.n_min,
        "coefficients": [str(c) for c in series.coeffs],
        "holdout": holdout,
    }
    if R is not None:
        rec["fit"] = R.to_json()
        rec["fit_text"] = str(R)
        rec["functional_equation"] = bool(check_functional_equation(R, series.d))
    return rec
