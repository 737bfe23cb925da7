"""Spacelike curves in Lorentz-Minkowski 3-space: invariants and reconstruction."""

from . import curves, exprs, identities, invariants, jets, mink3, reconstruct
from .curves import AnalyticCurve, SampledCurve, UnitSpeedCurve, builtin, from_angles, reparametrize_arclength
from .errors import MinkCurveError

__all__ = [
    "AnalyticCurve",
    "MinkCurveError",
    "SampledCurve",
    "UnitSpeedCurve",
    "builtin",
    "curves",
    "exprs",
    "from_angles",
    "identities",
    "invariants",
    "jets",
    "mink3",
    "reconstruct",
    "reparametrize_arclength",
]
