"""Command-line front end.

Results are JSON on stdout (``--format csv`` gives a flat projection); errors
are JSON on stderr.  Exit codes: 0 success, 1 engine error, 2 usage error,
3 non-isolated fixed locus.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .cfcobordism import cobordism_class_point, smooth_variety_class
from .chernloc import ChernIndex, chern_indices, chern_numbers, localization_data, parse_index
from .descent import grr_expansion, reduce_generalized
from .errors import NonIsolatedFixedLocus, PtCobordismError
from .qseries import CoeffSeries, RationalFn, check_common_poles, check_functional_equation, fit_rational
from .toric3 import ToricThreefold, load_and_validate, parse_class, virtual_dimension

CACHE_ENV = "PTCOBORDISM_CACHE"
BASIS_NOTE = "f_I are dual to monomial Chern numbers int prod_k c_k(T^vir)^{i_k}"

EXIT_OK, EXIT_ERROR, EXIT_USAGE, EXIT_NONISOLATED = 0, 1, 2, 3


# --------------------------------------------------------------------------
# cache

class ResultCache:
    """Content-addressed JSON cache; each entry carries the sha256 of its payload."""

    def __init__(self, root: str | Path | None):
        self.root = Path(root) if root else None
        if self.root:
            self.root.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(parts: dict) -> str:
        return hashlib.sha256(canonical_json(parts).encode()).hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> Any | None:
        if not self.root:
            return None
        path = self._path(key)
        try:
            entry = json.loads(path.read_text())
            payload = entry["payload"]
            if hashlib.sha256(canonical_json(payload).encode()).hexdigest() != entry["sha256"]:
                return None
            return payload
        except (OSError, ValueError, KeyError, TypeError):
            return None

    def put(self, key: str, payload: Any) -> None:
        if not self.root:
            return
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {
            "sha256": hashlib.sha256(canonical_json(payload).encode()).hexdigest(),
            "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "payload": payload,
        }
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w") as fh:
            fh.write(canonical_json(entry))
        os.replace(tmp, path)

    def fetch(self, parts: dict, compute: Callable[[], Any]) -> Any:
        key = self.key(parts)
        hit = self.get(key)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        payload = compute()
        self.put(key, payload)
        return payload


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# --------------------------------------------------------------------------
# helpers

def _index_list(idx: Sequence[int]) -> list[int]:
    return list(idx)


def _load(src: str) -> ToricThreefold:
    return load_and_validate(src)


def _common(X: ToricThreefold, beta, args) -> dict:
    return {
        "geometry": X.name,
        "geometry_hash": X.geometry_hash(),
        "beta": list(beta),
        "d": virtual_dimension(X, beta),
        "seed": args.seed,
        "specializations": args.specializations,
        "engine": "ptvertex" if args.enable_ptvertex else "deg1",
        "version": __version__,
    }


def _numbers(X: ToricThreefold, beta, n: int, args, cache: ResultCache) -> dict[ChernIndex, Fraction]:
    """All Chern numbers at one n, through the cache."""
    parts = {
        "kind": "chern_numbers",
        "geometry": X.geometry_hash(),
        "beta": list(beta),
        "n": n,
        "seed": args.seed,
        "specializations": args.specializations,
        "ptvertex": bool(args.enable_ptvertex),
        "version": __version__,
    }

    def compute():
        vals = chern_numbers(
            X, beta, n, seed=args.seed, specializations=args.specializations, enable_ptvertex=args.enable_ptvertex
        )
        return [[list(k), str(v)] for k, v in vals.items()]

    rows = cache.fetch(parts, compute)
    return {tuple(k): Fraction(v) for k, v in rows}


def _fmt_char(char) -> list:
    return [[list(w), str(c)] for w, c in char.sorted_items()]


# --------------------------------------------------------------------------
# commands

def cmd_validate(args, cache) -> dict:
    X = _load(args.src)
    return {
        "valid": True,
        "geometry": X.name,
        "geometry_hash": X.geometry_hash(),
        "fixed_points": len(X.fixed_points),
        "edges": len(X.edges),
        "h2_rank": X.h2_rank,
        "c1_degrees": list(X.c1_degrees),
    }


def cmd_fixed_points(args, cache) -> dict:
    X = _load(args.geometry)
    beta = parse_class(X, args.beta)
    data = localization_data(X, beta, args.n, args.enable_ptvertex)
    pairs = []
    for key, char in data:
        pairs.append({"key": json.loads(json.dumps(key, default=_jsonable)), "character": _fmt_char(char)})
    out = _common(X, beta, args)
    out.update({"n": args.n, "count": len(pairs), "pairs": pairs})
    return out


def _jsonable(obj):
    if isinstance(obj, (frozenset, set)):
        return sorted(obj)
    raise TypeError(type(obj).__name__)


def cmd_chern_number(args, cache) -> dict:
    X = _load(args.geometry)
    beta = parse_class(X, args.beta)
    idx = parse_index(args.index)
    vals = _numbers(X, beta, args.n, args, cache)
    if idx not in vals:
        raise PtCobordismError(f"index {idx} is not a Chern index of degree {virtual_dimension(X, beta)}")
    out = _common(X, beta, args)
    out.update({"n": args.n, "I": _index_list(idx), "value": str(vals[idx])})
    return out


def cmd_partition_function(args, cache) -> dict:
    X = _load(args.geometry)
    beta = parse_class(X, args.beta)
    d = virtual_dimension(X, beta)
    indices = [parse_index(args.index)] if args.index else chern_indices(d)
    rows = [_numbers(X, beta, n, args, cache) for n in range(1, args.nmax + 1)]
    records = []
    fits: list[RationalFn] = []
    for idx in indices:
        if idx not in chern_indices(d):
            raise PtCobordismError(f"index {idx} is not a Chern index of degree {d}")
        series = CoeffSeries(1, tuple(r[idx] for r in rows), X.name, tuple(beta), idx, d)
        rec: dict[str, Any] = {"I": _index_list(idx), "coefficients": [str(c) for c in series.coeffs]}
        if args.fit or args.check_symmetry or args.check_poles:
            R = fit_rational(series, mode=args.fit_mode, holdout=args.holdout)
            fits.append(R)
            rec["fit"] = R.to_json()
            rec["fit_text"] = str(R)
            rec["holdout"] = args.holdout
            if args.check_symmetry:
                fe = check_functional_equation(R, d)
                rec["functional_equation"] = fe.holds
                if not fe.holds:
                    rec["residual"] = [str(c) for c in fe.residual]
        records.append(rec)
    out = _common(X, beta, args)
    out.update({"n_min": 1, "n_max": args.nmax, "basis": BASIS_NOTE, "series": records})
    if args.check_poles and fits:
        out["poles"] = check_common_poles(fits).to_json()
    return out


def cmd_cobordism_class(args, cache) -> dict:
    X = _load(args.geometry)
    beta = parse_class(X, args.beta)
    d = virtual_dimension(X, beta)
    vals = _numbers(X, beta, args.n, args, cache)
    cls = cobordism_class_point(vals, d)
    out = _common(X, beta, args)
    out.update(
        {
            "n": args.n,
            "chern_numbers": [{"I": _index_list(k), "value": str(v)} for k, v in vals.items()],
            "class": cls.to_json(),
            "class_text": str(cls),
        }
    )
    return out


def cmd_smooth_class(args, cache) -> dict:
    X = _load(args.geometry)
    res = smooth_variety_class(X, seed=args.seed, specializations=args.specializations)
    out = {"geometry": X.name, "geometry_hash": X.geometry_hash(), "version": __version__}
    out.update(res.to_json())
    out["class_text"] = str(res.cls)
    return out


def cmd_descendents(args, cache) -> dict:
    X = _load(args.geometry)
    expr = grr_expansion(X, args.chk)
    red = reduce_generalized(expr, X)
    return {
        "geometry": X.name,
        "k": args.chk,
        "version": __version__,
        "expansion": expr.to_json(),
        "expansion_text": expr.to_text(),
        "reduced": red.to_json(),
        "reduced_text": red.to_text(),
    }


# --------------------------------------------------------------------------
# output

def _csv(result: dict) -> str:
    """Flat projection: one row per series coefficient, pair, or scalar field."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if "series" in result:
        w.writerow(["I", "n", "coefficient"])
        for rec in result["series"]:
            for k, c in enumerate(rec["coefficients"]):
                w.writerow([",".join(map(str, rec["I"])), result["n_min"] + k, c])
    elif "pairs" in result:
        w.writerow(["pair", "weight", "multiplicity"])
        for i, p in enumerate(result["pairs"]):
            for wt, c in p["character"]:
                w.writerow([i, ",".join(map(str, wt)), c])
    elif "class" in result:
        w.writerow(["I", "coefficient"])
        for t in result["class"]:
            w.writerow([",".join(map(str, t["I"])), t["coefficient"]])
    elif "expansion" in result:
        w.writerow(["coefficient", "term"])
        for line in result["reduced_text"].splitlines():
            coeff, _, rest = line.partition(" * ")
            w.writerow([coeff, rest])
    else:
        w.writerow(["key", "value"])
        for k, v in sorted(result.items()):
            if not isinstance(v, (dict, list)):
                w.writerow([k, v])
    return buf.getvalue()


# --------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--specializations", type=int, default=2)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--cache", default=None, help=f"cache directory (default: ${CACHE_ENV} if set)")
    common.add_argument("--enable-ptvertex", action="store_true")

    p = argparse.ArgumentParser(prog="ptcobordism", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("geometry", help="geometry utilities")
    gsub = g.add_subparsers(dest="action", required=True)
    v = gsub.add_parser("validate", parents=[common])
    v.add_argument("src", help="catalog id or JSON file")
    v.set_defaults(func=cmd_validate)

    def geom(name, func, **extra):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("geometry")
        sp.set_defaults(func=func)
        return sp

    sp = geom("fixed-points", cmd_fixed_points)
    sp.add_argument("--beta", required=True)
    sp.add_argument("--n", type=int, required=True)

    sp = geom("chern-number", cmd_chern_number)
    sp.add_argument("--beta", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--index", required=True, help="comma-separated multi-index, e.g. 0,1")

    sp = geom("partition-function", cmd_partition_function)
    sp.add_argument("--beta", required=True)
    sp.add_argument("--index", default=None, help="one multi-index; all indices when omitted")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--fit", action="store_true")
    sp.add_argument("--fit-mode", choices=["pade", "ansatz"], default="pade")
    sp.add_argument("--holdout", type=int, default=2)
    sp.add_argument("--check-symmetry", action="store_true")
    sp.add_argument("--check-poles", action="store_true")

    sp = geom("cobordism-class", cmd_cobordism_class)
    sp.add_argument("--beta", required=True)
    sp.add_argument("--n", type=int, required=True)

    geom("smooth-class", cmd_smooth_class)

    sp = geom("descendents", cmd_descendents)
    sp.add_argument("--chk", type=int, required=True)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.specializations < 2:
        parser.error("--specializations must be at least 2")
    if getattr(args, "holdout", 2) < 2:
        parser.error("--holdout must be at least 2")
    cache = ResultCache(args.cache or os.environ.get(CACHE_ENV))
    try:
        result = args.func(args, cache)
    except NonIsolatedFixedLocus as exc:
        sys.stderr.write(canonical_json(exc.payload()) + "\n")
        return EXIT_NONISOLATED
    except PtCobordismError as exc:
        sys.stderr.write(canonical_json(exc.payload()) + "\n")
        return EXIT_ERROR
    if args.format == "csv":
        sys.stdout.write(_csv(result))
    else:
        sys.stdout.write(json.dumps(result, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
