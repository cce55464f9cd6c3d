"""Exception hierarchy shared by all engine modules."""

from __future__ import annotations


class PtCobordismError(Exception):
    """Base class for every error raised by the package."""

    code = "error"

    def payload(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


# exact arithmetic
class NotPolynomial(PtCobordismError):
    pass


class DegenerateFunctional(PtCobordismError):
    pass


# geometry
class ParseError(PtCobordismError):
    pass


class ValidationError(PtCobordismError):
    def __init__(self, message: str, edge: int | None = None, rule: str | None = None):
        super().__init__(message)
        self.edge = edge
        self.rule = rule

    def payload(self) -> dict:
        out = super().payload()
        out["edge"] = self.edge
        out["rule"] = self.rule
        return out


class ZeroClass(PtCobordismError):
    pass


# fixed-point engines
class NotDegreeOne(PtCobordismError):
    pass


class NonIsolatedFixedLocus(PtCobordismError):
    pass


class NonIsolatedFixedPoint(NonIsolatedFixedLocus):
    pass


class EngineUnavailable(PtCobordismError):
    pass


# localization
class ZeroWeightPresent(PtCobordismError):
    pass


class SpecializationMismatch(PtCobordismError):
    pass


class DegenerateSpecialization(PtCobordismError):
    pass


# cobordism / linear algebra
class SingularMatrix(PtCobordismError):
    pass


class IncompleteVector(PtCobordismError):
    pass


# descendents
class UnsupportedSpace(PtCobordismError):
    pass


# q-series
class NoFit(PtCobordismError):
    pass
