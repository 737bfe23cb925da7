"""Curves from invariant data.

The frame ``F = (e, kappa, beta)`` (or ``(e, n, b)`` for Frenet data) obeys
``F' = F M(s)``; together with ``gamma' = e`` that is a 12-dimensional linear
ODE, integrated here with fixed-step classical Runge-Kutta from the anchor
point outward in both directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq, minimize_scalar

from . import exprs, invariants, mink3
from .curves import SampledCurve, UnitSpeedCurve, as_unit_speed
from .errors import InvalidData, NotAFrame, Singular, StepTooLarge

SQRT_HALF = math.sqrt(0.5)


# invariant functions

class ExprFunction:
    def __init__(self, expr, variable: str = "s"):
        self.expr = exprs.parse(expr, variable) if isinstance(expr, str) else expr
        self.variable = variable

    def __call__(self, s) -> np.ndarray:
        return exprs.eval_jet(self.expr, s, 0).value

    def derivative(self, s) -> np.ndarray:
        return exprs.eval_jet(self.expr, s, 1).c[1]

    def describe(self):
        return exprs.to_string(self.expr)


class TableFunction:
    """Tabulated function, interpolated by a cubic spline."""

    def __init__(self, s, v):
        s = np.asarray(s, dtype=float)
        v = np.asarray(v, dtype=float)
        if s.ndim != 1 or s.shape != v.shape or len(s) < 4:
            raise InvalidData("a table needs matching s and v arrays with at least 4 entries")
        if np.any(np.diff(s) <= 0):
            raise InvalidData("table s values must be strictly increasing")
        self.s, self.v = s, v
        self._spline = CubicSpline(s, v)
        self._d = self._spline.derivative()

    def __call__(self, s) -> np.ndarray:
        return self._spline(np.asarray(s, dtype=float))

    def derivative(self, s) -> np.ndarray:
        return self._d(np.asarray(s, dtype=float))

    def describe(self):
        return {"table": {"s": self.s.tolist(), "v": self.v.tolist()}}


Function = Union[ExprFunction, TableFunction]


def as_function(f) -> Function:
    if isinstance(f, (ExprFunction, TableFunction)):
        return f
    if isinstance(f, (int, float)) and not isinstance(f, bool):
        return ExprFunction(repr(float(f)) if f >= 0 else f"-{-float(f)!r}")
    if isinstance(f, str):
        return ExprFunction(f)
    if isinstance(f, dict) and "table" in f:
        t = f["table"]
        if not isinstance(t, dict) or "s" not in t or "v" not in t:
            raise InvalidData("a table function needs 's' and 'v' lists")
        return TableFunction(t["s"], t["v"])
    raise InvalidData(f"cannot interpret {f!r} as a function")


# invariant data

def _domain(d) -> tuple[float, float]:
    a, b = (float(x) for x in d)
    if not a < b:
        raise InvalidData(f"empty domain [{a}, {b}]")
    return a, b


@dataclass
class FrenetData:
    kappa: Function
    tau: Function
    sigma: int
    domain: tuple[float, float]
    anchor: float | None = None
    kind = "Frenet"

    def __post_init__(self):
        self.kappa, self.tau = as_function(self.kappa), as_function(self.tau)
        self.domain = _domain(self.domain)
        if self.sigma not in (1, -1):
            raise InvalidData("sigma must be +1 or -1")
        if self.anchor is None:
            self.anchor = self.domain[0]


@dataclass
class TypeLData:
    mu: Function
    domain: tuple[float, float]
    eps: int = 1
    anchor: float | None = None
    kind = "L"

    def __post_init__(self):
        self.mu = as_function(self.mu)
        self.domain = _domain(self.domain)
        if self.eps not in (1, -1):
            raise InvalidData("eps must be +1 or -1")
        if self.anchor is None:
            self.anchor = self.domain[0]


@dataclass
class TypeLkData:
    theta: Function
    mu: Function
    eps: int
    s0: float
    domain: tuple[float, float]
    kind = "Lk"

    def __post_init__(self):
        self.theta, self.mu = as_function(self.theta), as_function(self.mu)
        self.domain = _domain(self.domain)
        self.s0 = float(self.s0)
        if self.eps not in (1, -1):
            raise InvalidData("eps must be +1 or -1")

    @property
    def anchor(self) -> float:
        return self.s0


InvariantData = Union[FrenetData, TypeLData, TypeLkData]


@dataclass(frozen=True)
class IntegrationConfig:
    h: float = 1e-3
    projection: bool = False
    projection_every: int = 1
    stride: int = 1
    drift_limit: float = 1e-4

    def validate(self, domain) -> None:
        length = domain[1] - domain[0]
        if not self.h > 0:
            raise InvalidData("step h must be positive")
        if self.h > length / 16:
            raise InvalidData(f"step h={self.h} exceeds domain length / 16 = {length / 16}")
        if self.stride < 1 or self.projection_every < 1:
            raise InvalidData("stride and projection_every must be at least 1")


# frames

def initial_frame(eps: int) -> np.ndarray:
    """``E_eps``: columns ``(1,0,0)``, ``(0, eps/sqrt2, -1/sqrt2)``, ``(0, eps/sqrt2, 1/sqrt2)``."""
    if eps not in (1, -1):
        raise ValueError("eps must be +1 or -1")
    return np.array([
        [1.0, 0.0, 0.0],
        [0.0, eps * SQRT_HALF, eps * SQRT_HALF],
        [0.0, -SQRT_HALF, SQRT_HALF],
    ])


def frenet_initial_frame(sigma: int) -> np.ndarray:
    """Standard ``(e, n, b)``: ``n`` spacelike for type S, timelike for type T."""
    if sigma == -1:
        return np.eye(3)
    return np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])


def _expected_gram(data, theta: np.ndarray) -> np.ndarray:
    n = len(theta)
    g = np.zeros((n, 3, 3))
    g[:, 0, 0] = 1.0
    if data.kind == "Frenet":
        g[:, 1, 1] = -data.sigma
        g[:, 2, 2] = data.sigma
    else:
        g[:, 1, 1] = theta
        g[:, 1, 2] = g[:, 2, 1] = 1.0
    return g


def _expected_det(data) -> float:
    return 1.0 if data.kind == "Frenet" else float(data.eps)


def _coefficients(data, s: np.ndarray):
    """``M(s)`` stacked over ``s`` plus ``theta`` (zero for Frenet/L)."""
    n = len(s)
    m = np.zeros((n, 3, 3))
    theta = np.zeros(n)
    if data.kind == "Frenet":
        k, t, sg = data.kappa(s), data.tau(s), data.sigma
        m[:, 1, 0] = k
        m[:, 0, 1] = sg * k
        m[:, 2, 1] = sg * t
        m[:, 1, 2] = sg * t
    elif data.kind == "L":
        mu = data.mu(s)
        m[:, 1, 0] = 1.0
        m[:, 1, 1] = -mu
        m[:, 0, 2] = -1.0
        m[:, 2, 2] = mu
    else:
        theta = np.broadcast_to(data.theta(s), (n,)).astype(float)
        dth = np.broadcast_to(data.theta.derivative(s), (n,))
        mu = np.broadcast_to(data.mu(s), (n,))
        m[:, 1, 0] = 1.0
        m[:, 0, 1] = -theta
        m[:, 1, 1] = -mu
        m[:, 2, 1] = mu * theta + 0.5 * dth
        m[:, 0, 2] = -1.0
        m[:, 2, 2] = mu
    return m, theta


def _project(data, f: np.ndarray) -> np.ndarray:
    e = f[:, 0] / math.sqrt(float(mink3.square(f[:, 0])))
    if data.kind == "Frenet":
        n = f[:, 1] - mink3.inner(f[:, 1], e) * e
        n = n / math.sqrt(abs(float(mink3.square(n))))
        b = data.sigma * mink3.cross(e, n)
        return np.stack([e, n, b], axis=1)
    k = f[:, 1] - mink3.inner(f[:, 1], e) * e
    beta = invariants.null_line_beta(e, k, data.eps)
    return np.stack([e, k, beta], axis=1)


def _steps(a: float, b: float, h: float) -> np.ndarray:
    """Nodes from ``a`` toward ``b`` with step ``h`` and a short last step."""
    n = int(math.floor(abs(b - a) / h + 1e-9))
    d = math.copysign(h, b - a)
    s = a + d * np.arange(n + 1)
    if abs(s[-1] - b) > 1e-12 * max(1.0, abs(b)):
        s = np.append(s, b)
    else:
        s[-1] = b
    return s


def _rk4(data, cfg: IntegrationConfig, nodes: np.ndarray, f0: np.ndarray, x0: np.ndarray):
    n = len(nodes)
    if n == 1:
        return f0[None].copy(), x0[None].copy()
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    m_nodes, th_nodes = _coefficients(data, nodes)
    m_mids, _ = _coefficients(data, mids)
    gram = _expected_gram(data, th_nodes)
    det0 = _expected_det(data)
    fs = np.empty((n, 3, 3))
    xs = np.empty((n, 3))
    f, x = f0.copy(), x0.copy()
    fs[0], xs[0] = f, x
    for i in range(n - 1):
        h = nodes[i + 1] - nodes[i]
        m0, m1, m2 = m_nodes[i], m_mids[i], m_nodes[i + 1]
        k1 = f @ m0
        k2 = (f + 0.5 * h * k1) @ m1
        k3 = (f + 0.5 * h * k2) @ m1
        k4 = (f + h * k3) @ m2
        # gamma' = e, the first frame column
        x = x + h / 6.0 * (f[:, 0] + 2 * (f[:, 0] + 0.5 * h * k1[:, 0]) + 2 * (f[:, 0] + 0.5 * h * k2[:, 0])
                           + (f[:, 0] + h * k3[:, 0]))
        f = f + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if cfg.projection and (i + 1) % cfg.projection_every == 0:
            f = _project(data, f)
        drift = max(float(np.max(np.abs(f.T @ mink3.Z @ f - gram[i + 1]))), abs(float(np.linalg.det(f)) - det0))
        if not drift <= cfg.drift_limit:
            raise StepTooLarge(
                f"frame drift {drift:.3g} exceeds {cfg.drift_limit:g} at s={float(nodes[i + 1]):.12g}; reduce h"
            )
        fs[i + 1], xs[i + 1] = f, x
    return fs, xs


@dataclass
class ReconstructionResult:
    s: np.ndarray
    frames: np.ndarray  # (n, 3, 3), columns (e, kappa, beta) or (e, n, b)
    points: np.ndarray  # (n, 3)
    data: object
    config: IntegrationConfig
    diagnostics: dict = field(default_factory=dict)

    @property
    def anchor(self) -> float:
        return float(self.data.anchor)

    def curve(self, name: str = "reconstructed") -> UnitSpeedCurve:
        """Sampled unit-speed view of the output; Lk/L outputs carry their kappa column."""
        tangents = self.frames[:, :, 0]
        curv = None if self.data.kind == "Frenet" else self.frames[:, :, 1]
        return UnitSpeedCurve.from_unit_speed(SampledCurve(self.s, self.points, tangents, curv, name=name))

    def frame_at(self, s: float) -> np.ndarray:
        i = int(np.argmin(np.abs(self.s - s)))
        if abs(self.s[i] - s) > 1e-12 * max(1.0, abs(s)):
            raise NotAFrame(f"s={s!r} is not an output node")
        return self.frames[i]

    def anchored(self) -> "AnchoredCurve":
        return AnchoredCurve(self.curve(), self.anchor, self.frame_at(self.anchor), self.s)


def _drift_report(data, s: np.ndarray, frames: np.ndarray) -> dict:
    _, theta = _coefficients(data, s)
    g = mink3.frame_gram(frames)
    exp = _expected_gram(data, theta)
    det = np.linalg.det(frames)
    rel = {
        "e_e": np.abs(g[:, 0, 0] - 1.0),
        "det": np.abs(det - _expected_det(data)),
    }
    if data.kind == "Frenet":
        rel["n_n"] = np.abs(g[:, 1, 1] - exp[:, 1, 1])
        rel["b_b"] = np.abs(g[:, 2, 2] - exp[:, 2, 2])
        rel["e_n"] = np.abs(g[:, 0, 1])
        rel["e_b"] = np.abs(g[:, 0, 2])
        rel["n_b"] = np.abs(g[:, 1, 2])
    else:
        rel["e_kappa"] = np.abs(g[:, 0, 1])
        rel["kappa_kappa"] = np.abs(g[:, 1, 1] - theta)
        rel["e_beta"] = np.abs(g[:, 0, 2])
        rel["kappa_beta"] = np.abs(g[:, 1, 2] - 1.0)
        rel["beta_beta"] = np.abs(g[:, 2, 2])
    out = {k: float(v.max()) for k, v in rel.items()}
    out["frame_drift"] = max(out.values())
    out["unit_speed_drift"] = out["e_e"]
    return out


def _integrate(data, cfg: IntegrationConfig, f0: np.ndarray, x0) -> ReconstructionResult:
    cfg.validate(data.domain)
    a, b = data.domain
    s0 = float(data.anchor)
    if not a <= s0 <= b:
        raise InvalidData(f"anchor {s0} lies outside the domain [{a}, {b}]")
    f0 = np.asarray(f0, dtype=float)
    if f0.shape != (3, 3):
        raise InvalidData("initial frame must be 3x3")
    x0 = np.zeros(3) if x0 is None else np.asarray(x0, dtype=float)
    fwd = _steps(s0, b, cfg.h)
    bwd = _steps(s0, a, cfg.h)
    ff, xf = _rk4(data, cfg, fwd, f0, x0)
    fb, xb = _rk4(data, cfg, bwd, f0, x0)
    s = np.concatenate([bwd[:0:-1], fwd])
    frames = np.concatenate([fb[:0:-1], ff])
    pts = np.concatenate([xb[:0:-1], xf])
    if cfg.stride > 1:
        keep = np.zeros(len(s), bool)
        i0 = len(bwd) - 1
        keep[i0 % cfg.stride :: cfg.stride] = True
        keep[[0, i0, -1]] = True
        s, frames, pts = s[keep], frames[keep], pts[keep]
    diag = _drift_report(data, s, frames)
    return ReconstructionResult(s, frames, pts, data, cfg, diag)


def _other_zeros(theta: Function, s: np.ndarray, s0: float, tol: float) -> list[float]:
    """Zeros of ``theta`` on the grid other than the one at ``s0``."""
    v = np.asarray(theta(s), dtype=float)
    step = float(np.max(np.diff(s)))
    out = []
    sign = np.sign(v)
    for i in np.flatnonzero(sign[:-1] * sign[1:] < 0):
        z = brentq(lambda x: float(theta(x)), s[i], s[i + 1])
        out.append(z)
    for i in np.flatnonzero(np.abs(v) <= tol):
        out.append(float(s[i]))
    a = np.abs(v)
    for i in range(1, len(s) - 1):
        if a[i] <= a[i - 1] and a[i] <= a[i + 1] and v[i - 1] * v[i + 1] > 0 and a[i] > tol:
            r = minimize_scalar(lambda x: abs(float(theta(x))), bounds=(s[i - 1], s[i + 1]), method="bounded",
                                options={"xatol": 1e-12})
            if abs(r.fun) <= tol:
                out.append(float(r.x))
    return sorted(z for z in set(out) if abs(z - s0) > 3 * step)


def integrate_Lk(data: TypeLkData, cfg: IntegrationConfig = IntegrationConfig(), initial=None, origin=None,
                 allow_multiple_zeros: bool = False, zero_tol: float = 1e-10) -> ReconstructionResult:
    """Curve with causal curvature ``theta``, pseudo-torsion ``mu`` and sign ``eps`` at ``s0``."""
    a, b = data.domain
    if not a <= data.s0 <= b:
        raise InvalidData(f"s0={data.s0} lies outside the domain [{a}, {b}]")
    grid = np.linspace(a, b, max(257, int(64 * (b - a) / cfg.h) // 64 + 1))
    th = np.asarray(data.theta(grid), dtype=float) * np.ones_like(grid)
    scale = float(np.max(np.abs(th)))
    if scale <= zero_tol:
        raise InvalidData("theta vanishes identically; use integrate_typeL for type L data")
    t0 = abs(float(data.theta(np.asarray(data.s0))))
    if t0 > zero_tol * max(1.0, scale):
        raise InvalidData(f"theta(s0) = {t0:.3g} is not zero")
    others = _other_zeros(data.theta, grid, data.s0, zero_tol * max(1.0, scale))
    if others and not allow_multiple_zeros:
        raise InvalidData(
            f"theta has further zeros near s = {', '.join(f'{z:.6g}' for z in others)}; "
            "reconstruction is only unique with a single zero (pass allow_multiple_zeros to anchor at s0 anyway)"
        )
    f0 = initial_frame(data.eps) if initial is None else initial
    res = _integrate(data, cfg, f0, origin)
    if others:
        res.diagnostics["other_zeros"] = others
    return res


def integrate_frenet(data: FrenetData, cfg: IntegrationConfig = IntegrationConfig(), initial=None,
                     origin=None) -> ReconstructionResult:
    a, b = data.domain
    grid = np.linspace(a, b, 257)
    if np.any(np.asarray(data.kappa(grid)) * np.ones_like(grid) <= mink3.DEFAULT_TOL):
        raise InvalidData("kappa must be positive on the whole domain")
    f0 = frenet_initial_frame(data.sigma) if initial is None else initial
    return _integrate(data, cfg, f0, origin)


def integrate_typeL(data: TypeLData, cfg: IntegrationConfig = IntegrationConfig(), initial=None,
                    origin=None) -> ReconstructionResult:
    f0 = initial_frame(data.eps) if initial is None else initial
    return _integrate(data, cfg, f0, origin)


def integrate(data, cfg: IntegrationConfig = IntegrationConfig(), **kw) -> ReconstructionResult:
    fn = {"Lk": integrate_Lk, "L": integrate_typeL, "Frenet": integrate_frenet}[data.kind]
    return fn(data, cfg, **kw)


# normal forms and congruence

_LIGHTLIKE_GRAM = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]])


@dataclass(frozen=True)
class Normalization:
    T: np.ndarray
    lorentz_class: mink3.LorentzClass

    @property
    def proper(self) -> bool:
        return self.lorentz_class.proper

    @property
    def orthochronous(self) -> bool:
        return self.lorentz_class is mink3.LorentzClass.SOPLUS21


def normalize_frame(f, eps: int, tol: float = 1e-6) -> Normalization:
    """The ``T`` with ``T F = E_eps`` for a pseudo-binormal frame at a lightlike point.

    ``T`` is always a Lorentz transformation.  It is proper only when
    ``det F = eps``; otherwise the returned class is ``O21``.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (3, 3):
        raise NotAFrame("frame must be 3x3")
    d = float(np.linalg.det(f))
    if abs(d) < 1e-12:
        raise Singular("frame matrix is singular")
    g = mink3.frame_gram(f)
    bad = float(np.max(np.abs(g - _LIGHTLIKE_GRAM)))
    if bad > tol:
        raise NotAFrame(f"frame relations fail by {bad:.3g}")
    t = initial_frame(eps) @ np.linalg.inv(f)
    return Normalization(t, mink3.is_lorentz(t, 1e-8))


@dataclass
class AnchoredCurve:
    curve: UnitSpeedCurve
    s0: float
    frame: np.ndarray
    grid: np.ndarray | None = None

    @classmethod
    def from_curve(cls, c, s0: float, kind: str = "Lk", eps: int | None = None, grid=None) -> "AnchoredCurve":
        """Anchor an analysed curve at ``s0`` with its own frame there."""
        c = as_unit_speed(c)
        d = c.derivatives(np.asarray(float(s0)), 2)
        e, k = d[1], d[2]
        if kind == "Frenet":
            fr = invariants.frenet_apparatus(c, grid=np.array([s0]))
            f = fr.frame()[0]
        else:
            if eps is None:
                eps = invariants.sign_epsilon(c, s0) if kind == "Lk" else int(
                    1 if np.dot(mink3.cross(e, k), k) >= 0 else -1)
            f = np.stack([e, k, invariants.null_line_beta(e, k, eps)], axis=1)
        return cls(c, float(s0), f, None if grid is None else np.asarray(grid, dtype=float))


@dataclass(frozen=True)
class Alignment:
    T: np.ndarray
    translation: np.ndarray
    max_distance: float
    lorentz_class: mink3.LorentzClass


def align_by_isometry(a: AnchoredCurve, b: AnchoredCurve, grid=None, tol: float = 1e-6) -> Alignment:
    """Map ``a`` onto ``b`` using their frames at the shared anchor."""
    if abs(a.s0 - b.s0) > 1e-12 * max(1.0, abs(a.s0)):
        raise NotAFrame(f"anchors differ: {a.s0} vs {b.s0}")
    try:
        t = b.frame @ np.linalg.inv(a.frame)
    except np.linalg.LinAlgError:
        raise NotAFrame("frame of the first curve is singular") from None
    cls = mink3.is_lorentz(t, tol)
    if not cls.is_lorentz:
        raise NotAFrame("frames are not related by a Lorentz transformation")
    pa = a.curve.points(np.asarray(a.s0))
    pb = b.curve.points(np.asarray(b.s0))
    c = pb - t @ pa
    if grid is None:
        grid = a.grid if a.grid is not None else b.grid
    if grid is None:
        lo = max(a.curve.domain[0], b.curve.domain[0])
        hi = min(a.curve.domain[1], b.curve.domain[1])
        grid = np.linspace(lo, hi, 2001)
    grid = np.asarray(grid, dtype=float)
    diff = a.curve.points(grid) @ t.T + c - b.curve.points(grid)
    return Alignment(t, c, float(np.max(np.linalg.norm(diff, axis=-1))), cls)


# round trips

def roundtrip(data, cfg: IntegrationConfig = IntegrationConfig(), result: ReconstructionResult | None = None,
              **kw) -> dict:
    """Reconstruct, re-analyse and compare with the input invariants."""
    res = integrate(data, cfg, **kw) if result is None else result
    c = res.curve()
    s = res.s
    rep = {"kind": data.kind, "h": cfg.h, "nodes": int(len(s)),
           "frame_drift": res.diagnostics["frame_drift"],
           "unit_speed_drift": res.diagnostics["unit_speed_drift"]}
    if data.kind == "Frenet":
        fr = invariants.frenet_apparatus(c, grid=s)
        rep["kappa_error"] = float(np.max(np.abs(fr.kappa - data.kappa(s))))
        rep["tau_error"] = float(np.max(np.abs(fr.tau - data.tau(s))))
        rep["sigma_match"] = fr.sigma == data.sigma
        rep["sigma_hat"] = fr.sigma
    elif data.kind == "L":
        fr = invariants.typeL_frame(c, grid=s)
        rep["theta_error"] = float(np.max(np.abs(fr.theta)))
        rep["mu_error"] = float(np.max(np.abs(fr.mu - data.mu(s))))
        rep["eps_hat"] = fr.eps
        rep["eps_match"] = fr.eps == data.eps
    else:
        prof = invariants.causal_curvature(c, grid=s, detect=False)
        rep["theta_error"] = float(np.max(np.abs(prof.theta - data.theta(s))))
        eps_hat = invariants.sign_epsilon(c, data.s0)
        fr = invariants.pseudo_frame_Lk(c, data.s0, eps_hat, grid=s)
        rep["mu_error"] = float(np.max(np.abs(fr.mu - data.mu(fr.s))))
        rep["eps_hat"] = eps_hat
        rep["eps_match"] = eps_hat == data.eps
    return rep


def convergence(data, steps=(1e-2, 5e-3, 2.5e-3), key: str | None = None, **kw) -> dict:
    """Round-trip errors under step refinement and the observed orders."""
    key = key or ("kappa_error" if data.kind == "Frenet" else "theta_error")
    reports = [roundtrip(data, IntegrationConfig(h=h), **kw) for h in steps]
    errs = [r[key] for r in reports]
    orders = [math.log(e0 / e1) / math.log(h0 / h1) if e0 > 0 and e1 > 0 else math.nan
              for e0, e1, h0, h1 in zip(errs[:-1], errs[1:], steps[:-1], steps[1:])]
    return {"steps": list(steps), "key": key, "errors": errs, "orders": orders, "reports": reports}


def data_from_dict(d: dict) -> InvariantData:
    """Build invariant data from the JSON schema used by the command line."""
    if not isinstance(d, dict):
        raise InvalidData("invariant data must be a JSON object")
    kind = d.get("kind")
    allowed = {
        "Frenet": ({"kappa", "tau", "sigma"}, {"s0"}),
        "L": ({"mu"}, {"eps", "s0"}),
        "Lk": ({"theta", "mu", "eps", "s0"}, set()),
    }
    if kind not in allowed:
        raise InvalidData(f"kind must be one of Frenet, L, Lk; got {kind!r}")
    need, opt = allowed[kind]
    keys = set(d) - {"kind", "domain"}
    missing = need - keys
    extra = keys - need - opt
    if missing:
        raise InvalidData(f"kind {kind} needs field(s): {', '.join(sorted(missing))}")
    if extra:
        raise InvalidData(f"kind {kind} does not take field(s): {', '.join(sorted(extra))}")
    dom = d.get("domain", [-1.0, 1.0])
    if not (isinstance(dom, (list, tuple)) and len(dom) == 2):
        raise InvalidData("domain must be [a, b]")
    try:
        if kind == "Frenet":
            return FrenetData(d["kappa"], d["tau"], int(d["sigma"]), dom, d.get("s0"))
        if kind == "L":
            return TypeLData(d["mu"], dom, int(d.get("eps", 1)), d.get("s0"))
        return TypeLkData(d["theta"], d["mu"], int(d["eps"]), float(d["s0"]), dom)
    except (TypeError, ValueError) as exc:
        raise InvalidData(str(exc)) from None


def data_to_dict(data) -> dict:
    out: dict = {"kind": data.kind}
    if data.kind == "Frenet":
        out.update(kappa=data.kappa.describe(), tau=data.tau.describe(), sigma=data.sigma, s0=data.anchor)
    elif data.kind == "L":
        out.update(mu=data.mu.describe(), eps=data.eps, s0=data.anchor)
    else:
        out.update(theta=data.theta.describe(), mu=data.mu.describe(), eps=data.eps, s0=data.s0)
    out["domain"] = list(data.domain)
    return out
