"""Vector and matrix algebra in Lorentz-Minkowski 3-space.

Vectors are array-likes whose last axis has length 3, so every function
broadcasts over leading batch axes.  Integer or ``Fraction`` inputs stay
exact: nothing here divides unless it has to.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, PreconditionViolation

#: The metric matrix diag(1, 1, -1).
Z = np.diag([1.0, 1.0, -1.0])

DEFAULT_TOL = 1e-10


class Causal(str, enum.Enum):
    SPACELIKE = "Spacelike"
    TIMELIKE = "Timelike"
    LIGHTLIKE = "Lightlike"


@dataclass(frozen=True)
class CausalClass:
    tag: Causal
    is_zero: bool = False

    @property
    def spacelike(self) -> bool:
        return self.tag is Causal.SPACELIKE

    @property
    def timelike(self) -> bool:
        return self.tag is Causal.TIMELIKE

    @property
    def lightlike(self) -> bool:
        return self.tag is Causal.LIGHTLIKE

    def __str__(self) -> str:
        return self.tag.value + (" (zero)" if self.is_zero else "")


class LorentzClass(str, enum.Enum):
    NOT_LORENTZ = "not_lorentz"
    O21 = "O21"
    SO21 = "SO21"
    SOPLUS21 = "SOplus21"

    @property
    def is_lorentz(self) -> bool:
        return self is not LorentzClass.NOT_LORENTZ

    @property
    def proper(self) -> bool:
        return self in (LorentzClass.SO21, LorentzClass.SOPLUS21)


def _split(v):
    v = np.asarray(v)
    if v.shape[-1] != 3:
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    return v[..., 0], v[..., 1], v[..., 2]


def inner(v, w):
    """Minkowski pairing x1*x2 + y1*y2 - z1*z2."""
    vx, vy, vz = _split(v)
    wx, wy, wz = _split(w)
    return vx * wx + vy * wy - vz * wz


def square(v):
    return inner(v, v)


def norm(v):
    """``sqrt(|<v,v>|)``; zero for lightlike vectors."""
    return np.sqrt(np.abs(np.asarray(square(v), dtype=float)))


def cross(v, w):
    """Lorentzian vector product ``Z (v x_e w)``."""
    vx, vy, vz = _split(v)
    wx, wy, wz = _split(w)
    return np.stack(
        [vy * wz - vz * wy, vz * wx - vx * wz, -(vx * wy - vy * wx)], axis=-1
    )


def scalar_triple(u, v, w):
    """``det(u, v, w)`` with the vectors as columns (Leibniz expansion)."""
    ux, uy, uz = _split(u)
    vx, vy, vz = _split(v)
    wx, wy, wz = _split(w)
    return (
        ux * (vy * wz - wy * vz)
        - vx * (uy * wz - wy * uz)
        + wx * (uy * vz - vy * uz)
    )


def euclid_norm(v):
    return np.linalg.norm(np.asarray(v, dtype=float), axis=-1)


def causal_class(v, tol: float = DEFAULT_TOL) -> CausalClass:
    """Classify a single vector.

    ``<v,v>`` is compared against ``tol * max(1, |v|_e^2)``.  The zero vector
    counts as spacelike, with ``is_zero`` set.
    """
    if tol < 0:
        raise PreconditionViolation("tol must be non-negative")
    v = np.asarray(v)
    if not np.any(v):
        return CausalClass(Causal.SPACELIKE, is_zero=True)
    q = float(square(v))
    band = tol * max(1.0, float(euclid_norm(v)) ** 2)
    if q > band:
        return CausalClass(Causal.SPACELIKE)
    if q < -band:
        return CausalClass(Causal.TIMELIKE)
    return CausalClass(Causal.LIGHTLIKE)


def lightlike_cross_sign(v, w, tol: float = DEFAULT_TOL) -> int:
    """Return the sign ``eps`` with ``v x w = eps |v| w``.

    ``v`` must be spacelike and ``w`` lightlike and orthogonal to ``v``.  Two
    proportional lightlike vectors have vanishing Minkowski pairing, so the
    sign is read off the Euclidean dot product.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    wn = float(euclid_norm(w))
    if wn <= tol:
        raise DegenerateInput("lightlike argument is (numerically) zero")
    cv = causal_class(v, tol)
    if not cv.spacelike or cv.is_zero:
        raise PreconditionViolation(f"first argument must be non-zero spacelike, got {cv}")
    if not causal_class(w, tol).lightlike:
        raise PreconditionViolation(f"second argument is not lightlike: <w,w>={float(square(w))!r}")
    vn = float(euclid_norm(v))
    if abs(float(inner(v, w))) > tol * max(1.0, vn * wn):
        raise PreconditionViolation("arguments are not orthogonal")
    c = cross(v, w)
    eps = 1 if float(np.dot(c, w)) >= 0 else -1
    residual = float(euclid_norm(c - eps * float(norm(v)) * w))
    if residual > tol * wn * max(1.0, vn):
        raise PreconditionViolation(f"v x w is not proportional to w (residual {residual:.3g})")
    return eps


def is_lorentz(a, tol: float = DEFAULT_TOL) -> LorentzClass:
    """Strongest of O(2,1), SO(2,1), SO+(2,1) that ``a`` belongs to."""
    a = np.asarray(a, dtype=float)
    if a.shape != (3, 3):
        return LorentzClass.NOT_LORENTZ
    if np.max(np.abs(a.T @ Z @ a - Z)) > tol * max(1.0, float(np.max(np.abs(a))) ** 2):
        return LorentzClass.NOT_LORENTZ
    if abs(np.linalg.det(a) - 1.0) > max(tol, 1e-12) * max(1.0, float(np.max(np.abs(a))) ** 3):
        return LorentzClass.O21
    return LorentzClass.SOPLUS21 if a[2, 2] > 0 else LorentzClass.SO21


def frame_gram(f):
    """Gram matrix ``F^T Z F`` of the columns of ``f`` (batched over leading axes)."""
    f = np.asarray(f, dtype=float)
    return np.swapaxes(f, -1, -2) @ Z @ f


# Constructors for Lorentz transformations, used by tests, the CLI and
# the identity suite.

def rotation_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def boost_x(rapidity: float) -> np.ndarray:
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    return np.array([[ch, 0.0, sh], [0.0, 1.0, 0.0], [sh, 0.0, ch]])


def random_sop21(rng: np.random.Generator, max_rapidity: float = 1.0) -> np.ndarray:
    """Random element of SO+(2,1) as rotation * boost * rotation."""
    a, b = rng.uniform(0, 2 * np.pi, size=2)
    r = rng.uniform(-max_rapidity, max_rapidity)
    return rotation_z(a) @ boost_x(r) @ rotation_z(b)
