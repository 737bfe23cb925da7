"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for bad input or failed analysis, 3 for integration failures.
"""

from __future__ import annotations


class MinkCurveError(Exception):
    exit_code = 2


# mink3
class PreconditionViolation(MinkCurveError):
    pass


class DegenerateInput(MinkCurveError):
    pass


# exprs
class ParseError(MinkCurveError):
    def __init__(self, offset: int, message: str):
        super().__init__(f"at offset {offset}: {message}")
        self.offset = offset
        self.message = message


class UnknownFunction(ParseError):
    pass


class DomainError(MinkCurveError):
    pass


class NonSmooth(DomainError):
    pass


# curves
class DerivativeUnavailable(MinkCurveError):
    pass


class DegenerateVelocity(MinkCurveError):
    pass


class NotSpacelike(MinkCurveError):
    pass


class NonRegular(MinkCurveError):
    pass


# invariants
class ZeroCurvatureVector(MinkCurveError):
    def __init__(self, s: float, message: str | None = None):
        super().__init__(message or f"curvature vector vanishes at s={s!r}")
        self.s = s


class NonIsolatedZero(MinkCurveError):
    pass


class OrderAmbiguous(MinkCurveError):
    pass


class MixedCausality(MinkCurveError):
    pass


class NearLightlike(MinkCurveError):
    pass


class NotTypeL(MinkCurveError):
    pass


class GapTooWide(MinkCurveError):
    pass


# reconstruct
class InvalidData(MinkCurveError):
    pass


class StepTooLarge(MinkCurveError):
    exit_code = 3


class NotAFrame(MinkCurveError):
    pass


class Singular(MinkCurveError):
    pass
