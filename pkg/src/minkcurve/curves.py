"""Parametrized curves in L^3 and their arclength reparametrization.

Every curve exposes ``jet(t, order)``: a :class:`~minkcurve.jets.Jet` whose
batch axes are ``(3, *t.shape)``.  Analytic curves get exact derivatives from
expression jets; sampled curves get them from finite differences.
"""

from __future__ import annotations

import csv
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import PchipInterpolator

from . import exprs, jets, mink3
from .errors import (
    DegenerateVelocity,
    DerivativeUnavailable,
    NonRegular,
    NotSpacelike,
)

DEFAULT_NODE_DENSITY = 2048  # nodes per unit parameter length
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def vec(d: np.ndarray) -> np.ndarray:
    """Move the component axis of a ``(3, ...)`` array to the end."""
    return np.moveaxis(np.asarray(d), 0, -1)


class ParamCurve(ABC):
    """A curve ``t -> gamma(t)`` on a parameter interval."""

    name: str = "curve"
    domain: tuple[float, float]
    max_order: int = exprs.DEFAULT_ORDER

    @abstractmethod
    def jet(self, t, order: int) -> jets.Jet:
        ...

    def derivatives(self, t, order: int) -> np.ndarray:
        """Array of shape ``(order+1, 3, *t.shape)``: gamma, gamma', ..."""
        if order > self.max_order:
            raise DerivativeUnavailable(
                f"{self.name}: derivative of order {order} requested, {self.max_order} available"
            )
        return self.jet(t, order).derivatives()

    def points(self, t) -> np.ndarray:
        return vec(self.jet(t, 0).value)

    def __call__(self, t) -> np.ndarray:
        return self.points(t)


class AnalyticCurve(ParamCurve):
    """Curve given by three expressions in one variable."""

    def __init__(self, x, y, z, domain, variable: str = "t", name: str = "analytic"):
        self.exprs = tuple(exprs.parse(c, variable) if isinstance(c, str) else c for c in (x, y, z))
        self.domain = (float(domain[0]), float(domain[1]))
        self.variable = variable
        self.name = name
        if not self.domain[0] < self.domain[1]:
            raise ValueError(f"empty domain {domain}")

    def jet(self, t, order: int) -> jets.Jet:
        t = np.asarray(t, dtype=float)
        x = jets.Jet.variable(t, order)
        return jets.stack([exprs._eval(e, x) for e in self.exprs])

    def __repr__(self) -> str:
        return f"AnalyticCurve({', '.join(exprs.to_string(e) for e in self.exprs)}, domain={self.domain})"


class _CumulativeIntegral:
    """Running integral of a (vector) function from ``a``.

    Node values come from composite Simpson on a uniform grid; off-node
    values add an 8-point Gauss-Legendre integral from the nearest node.
    """

    def __init__(self, f: Callable[[np.ndarray], np.ndarray], a: float, b: float, n: int, start: float | None = None):
        n = max(int(n), 5) | 1
        self.f = f
        self.nodes = np.linspace(a, b, n)
        vals = f(self.nodes)
        self.table = cumulative_simpson(vals, x=self.nodes, axis=-1, initial=0.0)
        if start is not None and start != a:
            offset = self(np.asarray(start))
            self.table = self.table - offset[..., None]

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        i = np.clip(np.searchsorted(self.nodes, flat, side="right") - 1, 0, len(self.nodes) - 1)
        lo = self.nodes[i]
        half = 0.5 * (flat - lo)
        mid = lo + half
        pts = mid[:, None] + half[:, None] * _GL_X[None, :]
        vals = self.f(pts.reshape(-1))
        vals = vals.reshape(vals.shape[:-1] + pts.shape)
        rem = np.sum(vals * _GL_W, axis=-1) * half
        out = self.table[..., i] + rem
        return out.reshape(out.shape[:-1] + t.shape)


class AngleCurve(ParamCurve):
    """Unit-speed curve whose tangent is given by two angle functions.

    ``e(s) = (cosh a1 cos a2, cosh a1 sin a2, sinh a1)``; positions are
    recovered by quadrature with ``gamma(anchor) = origin``.
    """

    def __init__(self, a1, a2, domain, origin=(0.0, 0.0, 0.0), anchor=None,
                 variable: str = "s", n_nodes: int | None = None, name: str = "angle_curve"):
        self.a1 = exprs.parse(a1, variable) if isinstance(a1, str) else a1
        self.a2 = exprs.parse(a2, variable) if isinstance(a2, str) else a2
        self.domain = (float(domain[0]), float(domain[1]))
        self.origin = np.asarray(origin, dtype=float)
        self.anchor = self.domain[0] if anchor is None else float(anchor)
        self.name = name
        length = self.domain[1] - self.domain[0]
        n = n_nodes or max(65, int(DEFAULT_NODE_DENSITY * length))
        self._position = _CumulativeIntegral(
            lambda s: self._tangent(jets.Jet.variable(s, 0)).value,
            self.domain[0], self.domain[1], n, start=self.anchor,
        )

    def _tangent(self, x: jets.Jet) -> jets.Jet:
        a1 = exprs._eval(self.a1, x)
        a2 = exprs._eval(self.a2, x)
        ch = jets.cosh(a1)
        return jets.stack([ch * jets.cos(a2), ch * jets.sin(a2), jets.sinh(a1)])

    def angle_jets(self, s, order: int) -> tuple[jets.Jet, jets.Jet]:
        x = jets.Jet.variable(np.asarray(s, dtype=float), order)
        return exprs._eval(self.a1, x), exprs._eval(self.a2, x)

    def jet(self, t, order: int) -> jets.Jet:
        t = np.asarray(t, dtype=float)
        c = np.zeros((order + 1, 3) + t.shape)
        c[0] = self._position(t) + self.origin.reshape((3,) + (1,) * t.ndim)
        if order >= 1:
            e = self._tangent(jets.Jet.variable(t, order - 1))
            k = np.arange(1, order + 1).reshape((-1,) + (1,) * (t.ndim + 1))
            c[1:] = e.c / k
        return jets.Jet(c)


def fornberg_weights(z: float, x: np.ndarray, m: int) -> np.ndarray:
    """Finite-difference weights for derivatives 0..m at ``z`` from nodes ``x``.

    Returns an array of shape ``(len(x), m+1)``.
    """
    n = len(x)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


def nodal_derivatives(grid: np.ndarray, values: np.ndarray, m: int, stencil: int = 5) -> np.ndarray:
    """Derivatives 0..m of sampled ``values`` (shape ``(n, ...)``) at every node.

    Uses ``stencil`` nearest nodes: centred in the interior, one-sided at the
    ends.
    """
    n = len(grid)
    out = np.zeros((m + 1,) + values.shape)
    half = stencil // 2
    for i in range(n):
        lo = min(max(i - half, 0), n - stencil)
        w = fornberg_weights(grid[i], grid[lo : lo + stencil], m)
        out[:, i] = np.tensordot(w.T, values[lo : lo + stencil], axes=(1, 0))
    return out


class SampledCurve(ParamCurve):
    """Polyline samples with finite-difference derivatives.

    If ``tangents`` are supplied (e.g. from an ODE integration), derivative
    order d >= 1 is taken as the (d-1)-th difference of the tangent samples.
    With ``curvatures`` as well, order 2 is exact and orders 3..5 are
    differences of the curvature samples.  Off-node queries interpolate nodal
    values with degree-5 Lagrange polynomials.
    """

    def __init__(self, grid, points, tangents=None, curvatures=None, name: str = "sampled", stencil: int = 5):
        grid = np.asarray(grid, dtype=float)
        points = np.asarray(points, dtype=float)
        if grid.ndim != 1 or len(grid) < 5:
            raise DerivativeUnavailable("a sampled curve needs at least 5 nodes")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("sample grid must be strictly increasing")
        if points.shape != (len(grid), 3):
            raise ValueError(f"points must have shape ({len(grid)}, 3), got {points.shape}")
        if curvatures is not None and tangents is None:
            raise ValueError("curvature samples need tangent samples too")
        self.grid = grid
        self.samples = points
        self.name = name
        self.domain = (float(grid[0]), float(grid[-1]))
        self.exact_curvature = curvatures is not None
        if tangents is None:
            nod = nodal_derivatives(grid, points, 3, stencil)
        elif curvatures is None:
            tangents = np.asarray(tangents, dtype=float)
            nod = np.concatenate([points[None], nodal_derivatives(grid, tangents, 3, stencil)])
        else:
            tangents = np.asarray(tangents, dtype=float)
            curvatures = np.asarray(curvatures, dtype=float)
            nod = np.concatenate([points[None], tangents[None], nodal_derivatives(grid, curvatures, 3, stencil)])
        self.max_order = nod.shape[0] - 1
        self._nodal = nod  # (max_order+1, n, 3)

    def _interp(self, t: np.ndarray, order: int) -> np.ndarray:
        flat = t.reshape(-1)
        n = len(self.grid)
        deg = min(5, n - 1)
        lo = np.clip(np.searchsorted(self.grid, flat) - (deg + 1) // 2, 0, n - deg - 1)
        idx = lo[:, None] + np.arange(deg + 1)[None, :]
        xs = self.grid[idx]
        w = np.ones_like(xs)
        for j in range(deg + 1):
            for k in range(deg + 1):
                if k != j:
                    w[:, j] *= (flat - xs[:, k]) / (xs[:, j] - xs[:, k])
        vals = self._nodal[: order + 1][:, idx]  # (order+1, m, deg+1, 3)
        out = np.einsum("omjc,mj->ocm", vals, w)
        return out.reshape((order + 1, 3) + t.shape)

    def jet(self, t, order: int) -> jets.Jet:
        if order > self.max_order:
            raise DerivativeUnavailable(
                f"{self.name}: derivative of order {order} requested, {self.max_order} available"
            )
        t = np.asarray(t, dtype=float)
        return jets.Jet.from_derivatives(self._interp(t, order))


class TransformedCurve(ParamCurve):
    """``A gamma(t) + c`` for a linear map ``A`` and translation ``c``."""

    def __init__(self, curve: ParamCurve, a, c=(0.0, 0.0, 0.0), name: str | None = None):
        self.base = curve
        self.a = np.asarray(a, dtype=float)
        self.c = np.asarray(c, dtype=float)
        self.domain = curve.domain
        self.max_order = curve.max_order
        self.name = name or f"transformed({curve.name})"

    def jet(self, t, order: int) -> jets.Jet:
        j = self.base.jet(t, order)
        c = np.einsum("ij,kj...->ki...", self.a, j.c)
        c[0] += self.c.reshape((3,) + (1,) * (c.ndim - 2))
        return jets.Jet(c)


def velocity_class(c: ParamCurve, t: float, tol: float = mink3.DEFAULT_TOL) -> mink3.CausalClass:
    d = c.derivatives(np.asarray(t, dtype=float), 1)
    return mink3.causal_class(vec(d[1]), tol)


def curvature_vector_general(c: ParamCurve, t, tol: float = 1e-12) -> np.ndarray:
    """Curvature vector in an arbitrary parametrization.

    ``kappa = v x (v x a) / |v|^4`` with ``v``, ``a`` the velocity and
    acceleration.  Agrees with the second arclength derivative.
    """
    d = c.derivatives(np.asarray(t, dtype=float), 2)
    v, a = vec(d[1]), vec(d[2])
    speed = mink3.norm(v)
    if np.any(speed <= tol):
        raise DegenerateVelocity(f"{c.name}: velocity is null or zero")
    return mink3.cross(v, mink3.cross(v, a)) / (speed**4)[..., None]


class UnitSpeedCurve:
    """A spacelike curve viewed as a function of arclength ``s``.

    Either the parameter already is arclength (``identity``) or derivatives
    in ``s`` are obtained by inverting the series ``s(t)`` and composing.
    """

    def __init__(self, curve: ParamCurve, *, identity: bool, arclength: _CumulativeIntegral | None = None,
                 t_nodes: np.ndarray | None = None):
        self.curve = curve
        self.identity = identity
        self.name = curve.name
        self.max_order = curve.max_order
        if identity:
            self.domain = curve.domain
            self._s = None
        else:
            self._s = arclength
            s_nodes = arclength(t_nodes)
            self._t_nodes = t_nodes
            self._s_nodes = s_nodes
            self._inverse = PchipInterpolator(s_nodes, t_nodes)
            self.domain = (float(s_nodes[0]), float(s_nodes[-1]))

    @classmethod
    def from_unit_speed(cls, curve: ParamCurve) -> "UnitSpeedCurve":
        return cls(curve, identity=True)

    def s_of_t(self, t):
        return np.asarray(t, dtype=float) if self.identity else self._s(t)

    def t_of_s(self, s):
        s = np.asarray(s, dtype=float)
        if self.identity:
            return s
        t = self._inverse(s)
        for _ in range(4):
            v = mink3.norm(vec(self.curve.derivatives(t, 1)[1]))
            t = t - (self._s(t) - s) / v
        return t

    def jet(self, s, order: int) -> jets.Jet:
        s = np.asarray(s, dtype=float)
        if self.identity:
            return self.curve.jet(s, order)
        t = self.t_of_s(s)
        g = self.curve.jet(t, order)
        if order == 0:
            return g
        gd = g.derivative()
        speed = jets.sqrt(jets.inner(gd, gd))
        u = jets.revert(speed.integral(s))
        u.c[0] = t
        return jets.compose(g, u)

    def derivatives(self, s, order: int) -> np.ndarray:
        if order > self.max_order:
            raise DerivativeUnavailable(
                f"{self.name}: derivative of order {order} requested, {self.max_order} available"
            )
        return self.jet(s, order).derivatives()

    def points(self, s) -> np.ndarray:
        return vec(self.jet(s, 0).value)

    def grid(self, n: int | None = None, window=None) -> np.ndarray:
        a, b = self.domain if window is None else window
        if n is None:
            n = max(65, int(DEFAULT_NODE_DENSITY * (b - a)))
        return np.linspace(a, b, n)

    def __repr__(self) -> str:
        return f"UnitSpeedCurve({self.name}, domain={self.domain}, identity={self.identity})"


def _speeds(c: ParamCurve, t: np.ndarray, tol: float, causal_tol: float) -> np.ndarray:
    d = vec(c.derivatives(t, 1)[1])
    enorm = mink3.euclid_norm(d)
    bad = np.flatnonzero(enorm <= tol)
    if bad.size:
        raise NonRegular(f"{c.name}: velocity vanishes near t={float(t[bad[0]]):.12g}")
    q = mink3.square(d)
    bad = np.flatnonzero(q <= causal_tol * np.maximum(1.0, enorm**2))
    if bad.size:
        raise NotSpacelike(f"{c.name}: velocity is not spacelike at t={float(t[bad[0]]):.12g}")
    return np.sqrt(q)


def reparametrize_arclength(c: ParamCurve, n_nodes: int | None = None, tol: float = 1e-8,
                            causal_tol: float = mink3.DEFAULT_TOL,
                            node_density: int = DEFAULT_NODE_DENSITY) -> UnitSpeedCurve:
    """Arclength view of a spacelike curve, with ``s = a`` at the domain start ``a``."""
    a, b = c.domain
    if n_nodes is None:
        n_nodes = max(65, int(node_density * (b - a)))
    if n_nodes < 5:
        raise ValueError("n_nodes must be at least 5")
    t = np.linspace(a, b, int(n_nodes) | 1)
    v = _speeds(c, t, tol, causal_tol)
    if np.max(np.abs(v - 1.0)) <= tol:
        return UnitSpeedCurve.from_unit_speed(c)

    def speed(tt):
        return mink3.norm(vec(c.derivatives(tt, 1)[1]))

    arclength = _CumulativeIntegral(speed, a, b, len(t))
    arclength.table = arclength.table + a
    u = UnitSpeedCurve(c, identity=False, arclength=arclength, t_nodes=t)
    s_nodes = u.s_of_t(t)
    e = vec(u.derivatives(s_nodes, 1)[1])
    drift = np.max(np.abs(mink3.square(e) - 1.0))
    if drift > tol:
        raise NonRegular(f"{c.name}: arclength reparametrization drifted by {drift:.3g}")
    return u


def from_angles(a1, a2, domain, origin=(0.0, 0.0, 0.0), anchor=None, variable: str = "s",
                n_nodes: int | None = None, name: str = "angle_curve") -> AngleCurve:
    return AngleCurve(a1, a2, domain, origin, anchor, variable, n_nodes, name)


def as_unit_speed(c: ParamCurve | UnitSpeedCurve, **kw) -> UnitSpeedCurve:
    if isinstance(c, UnitSpeedCurve):
        return c
    return reparametrize_arclength(c, **kw)


# builtin catalogue

@dataclass(frozen=True)
class Builtin:
    name: str
    factory: Callable[[tuple[float, float]], ParamCurve]
    window: tuple[float, float]
    domain_note: str
    expected_type: str


def _lopez(window):
    return AnalyticCurve(
        "cos(s) + s*sin(s)",
        "sin(s) - s*cos(s)",
        "(s*sqrt(s^2 - 1) - log(abs(s + sqrt(s^2 - 1))))/2",
        window, variable="s", name="lopez_L1",
    )


BUILTINS: dict[str, Builtin] = {
    b.name.lower(): b
    for b in [
        Builtin("circle_S", lambda w: AnalyticCurve("cos(s)", "sin(s)", "0", w, "s", "circle_S"),
                (-math.pi, math.pi), "R", "S"),
        Builtin("hyperbola_T", lambda w: AnalyticCurve("0", "sinh(s)", "cosh(s)", w, "s", "hyperbola_T"),
                (-1.0, 1.0), "R", "T"),
        Builtin("parabola_L", lambda w: AnalyticCurve("s", "s^2/2", "s^2/2", w, "s", "parabola_L"),
                (-1.0, 1.0), "R", "L"),
        Builtin("lopez_L1", _lopez, (-2.5, -1.05), "(-inf,-1), window default [-2.5,-1.05]", "Mixed (L_1)"),
        Builtin("angle_gen", lambda w: AngleCurve("s", "-s + s^2/2", w, name="angle_gen"),
                (-1.0, 1.0), "R", "Mixed (L_1)"),
    ]
}


def builtin(name: str, window=None) -> ParamCurve:
    try:
        spec = BUILTINS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(b.name for b in BUILTINS.values())}") from None
    return spec.factory(tuple(window) if window is not None else spec.window)


# CSV I/O: header ``t,x,y,z`` (``s`` accepted in place of ``t``)

def read_curve_csv(path, name: str | None = None) -> SampledCurve:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader)]
        if header not in (["t", "x", "y", "z"], ["s", "x", "y", "z"]):
            raise ValueError(f"{path}: expected header t,x,y,z, got {','.join(header)}")
        rows = [[float(v) for v in row] for row in reader if row]
    data = np.asarray(rows, dtype=float).reshape(-1, 4)
    return SampledCurve(data[:, 0], data[:, 1:], name=name or str(path))


def write_curve_csv(path, t, points, parameter: str = "t") -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([parameter, "x", "y", "z"])
        for ti, p in zip(t, points):
            w.writerow([format(float(ti), ".17g")] + [format(float(v), ".17g") for v in p])
