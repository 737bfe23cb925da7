"""Differential invariants of spacelike curves.

Causal curvature ``theta = <kappa, kappa>`` with ``kappa = gamma''``, the
curve type (S, T, L or mixed with isolated L_k points), the Frenet frame
where ``theta`` has a sign, the pseudo-binormal frame ``(e, kappa, beta)``
with pseudo-torsion ``mu = -<kappa', beta>``, and the torsion blow-up
coefficient at an L_k point.

All functions accept a :class:`~minkcurve.curves.UnitSpeedCurve`; a plain
:class:`~minkcurve.curves.ParamCurve` is reparametrized by arclength first.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import jets, mink3
from .curves import SampledCurve, UnitSpeedCurve, as_unit_speed, vec
from .errors import (
    GapTooWide,
    MixedCausality,
    NearLightlike,
    NonIsolatedZero,
    NotTypeL,
    OrderAmbiguous,
    PreconditionViolation,
    ZeroCurvatureVector,
)

GAP_TOL = 1e-6  # relative |theta| band around an L_k point where beta's formula is 0/0
FIT_WINDOW_FRACTION = 0.02
MAX_ORDER = 4  # highest vanishing order of theta treated as an isolated zero
EPS_TOL = 1e-8


def _unit(c) -> UnitSpeedCurve:
    return as_unit_speed(c)


def _grid(c: UnitSpeedCurve, grid=None, n_nodes=None) -> np.ndarray:
    if grid is not None:
        return np.asarray(grid, dtype=float)
    return c.grid(n_nodes)


def default_theta_tol(c: UnitSpeedCurve) -> float:
    base = c.curve
    if isinstance(base, SampledCurve) and not base.exact_curvature:
        return 1e-6
    return mink3.DEFAULT_TOL


def theta_jet(c: UnitSpeedCurve, s, order: int = 1) -> jets.Jet:
    """Jet of ``theta`` at ``s`` (needs curve derivatives up to ``order + 2``)."""
    k = c.jet(np.asarray(s, dtype=float), order + 2).derivative().derivative()
    return jets.inner(k, k)


def theta_at(c: UnitSpeedCurve, s) -> np.ndarray:
    return theta_jet(c, s, 0).value


def theta_prime_at(c: UnitSpeedCurve, s) -> np.ndarray:
    return theta_jet(c, s, 1).c[1]


@dataclass(frozen=True)
class LightlikePoint:
    s0: float
    k: int
    eps: int
    slope: float = math.nan


@dataclass
class CausalCurvatureProfile:
    s: np.ndarray
    theta: np.ndarray
    theta_prime: np.ndarray
    zeros: list[LightlikePoint]
    curve: UnitSpeedCurve
    theta_tol: float
    all_lightlike: bool = False

    @property
    def scale(self) -> float:
        return float(np.max(np.abs(self.theta)))


@dataclass
class CurveTypeReport:
    tag: str  # 'S', 'T', 'L' or 'Mixed'
    points: list[LightlikePoint] = field(default_factory=list)
    intervals: list[tuple[float, float, str]] = field(default_factory=list)


def causal_curvature(c, grid=None, n_nodes=None, theta_tol=None, fit_window=None,
                     detect: bool = True, curvature_tol: float = mink3.DEFAULT_TOL) -> CausalCurvatureProfile:
    """Sample ``theta`` and ``theta'`` on a grid and locate curvature-lightlike points."""
    c = _unit(c)
    s = _grid(c, grid, n_nodes)
    d = c.derivatives(s, 3)
    k, kp = vec(d[2]), vec(d[3])
    kn = mink3.euclid_norm(k)
    bad = np.flatnonzero(kn <= curvature_tol)
    if bad.size:
        raise ZeroCurvatureVector(float(s[bad[0]]), f"{c.name}: curvature vector vanishes at s={float(s[bad[0]]):.12g}")
    theta = mink3.square(k)
    theta_prime = 2.0 * mink3.inner(k, kp)
    rel = default_theta_tol(c) if theta_tol is None else theta_tol
    tol = rel * max(1.0, float(np.max(kn)) ** 2)
    prof = CausalCurvatureProfile(s, theta, theta_prime, [], c, tol)
    if np.all(np.abs(theta) <= tol):
        prof.all_lightlike = True
        return prof
    if detect:
        prof.zeros = find_lightlike_points(prof, fit_window=fit_window)
    return prof


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive index ranges of consecutive True entries."""
    out = []
    i, n = 0, len(mask)
    while i < n:
        if mask[i]:
            j = i
            while j + 1 < n and mask[j + 1]:
                j += 1
            out.append((i, j))
            i = j + 1
        else:
            i += 1
    return out


def find_lightlike_points(p: CausalCurvatureProfile, fit_window=None) -> list[LightlikePoint]:
    """Locate isolated zeros of ``theta``, their order ``k`` and sign ``eps``."""
    c, s, th, thp = p.curve, p.s, p.theta, p.theta_prime
    tol = p.theta_tol
    n = len(s)
    span = float(s[-1] - s[0])
    xtol = 1e-10 * span
    near = np.abs(th) <= tol

    # widest run an isolated zero of order <= MAX_ORDER can leave below tol
    flat = 2.0 * (tol / max(p.scale, tol)) ** (1.0 / MAX_ORDER)
    brackets: list[tuple[int, int, bool]] = []  # (lo, hi, sign change)
    for a, b in _runs(near):
        if b - a + 1 > 3 and float(s[b] - s[a]) > flat:
            raise NonIsolatedZero(
                f"theta stays within {tol:.3g} on [{float(s[a]):.12g}, {float(s[b]):.12g}] ({b - a + 1} nodes); the curve may be type L there"
            )
        lo, hi = max(a - 1, 0), min(b + 1, n - 1)
        brackets.append((lo, hi, th[lo] * th[hi] < 0))
    sign = np.sign(th)
    for i in np.flatnonzero((sign[:-1] * sign[1:] < 0) & ~near[:-1] & ~near[1:]):
        brackets.append((int(i), int(i) + 1, True))
    a = np.abs(th)
    screen = 0.1 * p.scale
    for i in range(1, n - 1):
        if (a[i] <= a[i - 1] and a[i] <= a[i + 1] and a[i] < screen and not near[i]
                and thp[i - 1] * thp[i + 1] < 0 and th[i - 1] * th[i + 1] > 0):
            brackets.append((i - 1, i + 1, False))

    found: list[float] = []
    for lo, hi, crossing in sorted(brackets):
        x0, x1 = float(s[lo]), float(s[hi])
        if crossing:
            z = brentq(lambda x: float(theta_at(c, x)), x0, x1, xtol=xtol, rtol=1e-15)
        else:
            z = _touch_zero(c, x0, x1, xtol)
            if z is None or abs(float(theta_at(c, z))) > tol:
                continue
        found.append(z)

    found.sort()
    merged: list[float] = []
    step = span / max(n - 1, 1)
    for z in found:
        if merged and abs(z - merged[-1]) <= 1e-9 * span:
            continue
        if merged and abs(z - merged[-1]) < 3 * step:
            raise NonIsolatedZero(f"two curvature-lightlike points within 3 grid steps near s={float(z):.12g}")
        merged.append(z)

    window = FIT_WINDOW_FRACTION * span if fit_window is None else float(fit_window)
    out = []
    for z in merged:
        k, slope = estimate_order(c, z, window)
        _validate_order(c, z, k, p.scale)
        out.append(LightlikePoint(float(z), k, sign_epsilon(c, z), slope))
    return out


def _touch_zero(c, x0, x1, xtol):
    def dth(x):
        return float(theta_prime_at(c, x))

    f0, f1 = dth(x0), dth(x1)
    if f0 * f1 < 0:
        return brentq(dth, x0, x1, xtol=xtol, rtol=1e-15)
    r = minimize_scalar(lambda x: abs(float(theta_at(c, x))), bracket=(x0, 0.5 * (x0 + x1), x1),
                        method="golden", tol=1e-12)
    return float(r.x) if x0 <= r.x <= x1 else None


def estimate_order(c: UnitSpeedCurve, s0: float, window: float, n_points: int = 12) -> tuple[int, float]:
    """Vanishing order of ``theta`` at ``s0`` from a log-log slope fit.

    Samples ``|theta(s0 +- d)|`` for ``d`` geometric in ``[window/100, window]``.
    """
    d = np.geomspace(window / 100, window, n_points)
    a, b = c.domain
    xs, ds = [], []
    for side in (1.0, -1.0):
        x = s0 + side * d
        ok = (x > a) & (x < b)
        if ok.sum() >= 4:
            xs.append(x[ok])
            ds.append(d[ok])
    if not xs:
        raise OrderAmbiguous(f"no room to estimate the order of theta at s={float(s0):.12g}")
    x = np.concatenate(xs)
    dd = np.concatenate(ds)
    th = np.abs(theta_at(c, x))
    ok = th > 0
    slope = float(np.polyfit(np.log(dd[ok]), np.log(th[ok]), 1)[0])
    k = int(round(slope))
    if abs(slope - k) > 0.2 or k < 1:
        raise OrderAmbiguous(f"log-log slope {slope:.3f} at s={float(s0):.12g} is not close to an integer")
    return k, slope


def _validate_order(c: UnitSpeedCurve, s0: float, k: int, scale: float) -> None:
    tol = 1e-6 * max(1.0, scale)
    if c.max_order >= k + 2:
        t = theta_jet(c, s0, k).derivatives()
        low, top = np.abs(t[:k]), abs(float(t[k]))
    else:
        # not enough derivatives: use theta(s0+d)/d^k -> theta^(k)/k!
        d = np.array([1e-3, 2e-3, 4e-3]) * (c.domain[1] - c.domain[0])
        vals = theta_at(c, np.concatenate([s0 + d, s0 - d]))
        top = math.factorial(k) * float(np.min(np.abs(vals) / np.concatenate([d, d]) ** k))
        low = np.abs(theta_at(c, np.array([s0])))
    if np.any(low > tol) or top <= tol:
        raise OrderAmbiguous(f"theta derivatives at s={float(s0):.12g} do not confirm order {k}")


def classify(p: CausalCurvatureProfile) -> CurveTypeReport:
    if p.all_lightlike:
        return CurveTypeReport("L", [], [(float(p.s[0]), float(p.s[-1]), "L")])
    tol = p.theta_tol
    if not p.zeros:
        if np.all(p.theta > tol):
            return CurveTypeReport("S", [], [(float(p.s[0]), float(p.s[-1]), "S")])
        if np.all(p.theta < -tol):
            return CurveTypeReport("T", [], [(float(p.s[0]), float(p.s[-1]), "T")])
    cuts = [float(p.s[0])] + [z.s0 for z in p.zeros] + [float(p.s[-1])]
    intervals = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi <= lo:
            continue
        mid = float(theta_at(p.curve, 0.5 * (lo + hi)))
        intervals.append((lo, hi, "S" if mid > 0 else "T"))
    return CurveTypeReport("Mixed", list(p.zeros), intervals)


def sign_epsilon(c, s0: float, tol: float = EPS_TOL) -> int:
    """The sign with ``e(s0) x kappa(s0) = eps kappa(s0)``."""
    c = _unit(c)
    d = c.derivatives(np.asarray(float(s0)), 2)
    return mink3.lightlike_cross_sign(d[1], d[2], tol)


# Frenet frames (theta of constant sign)

@dataclass
class FrenetApparatus:
    s: np.ndarray
    e: np.ndarray
    n: np.ndarray
    b: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    sigma: int
    residuals: dict[str, float]

    def frame(self) -> np.ndarray:
        return np.stack([self.e, self.n, self.b], axis=-1)


def frenet_apparatus(c, subinterval=None, grid=None, n_nodes=None, tol=None) -> FrenetApparatus:
    """Frame ``(e, n, b)``, curvature ``sqrt|theta|`` and torsion ``<n', b>``.

    ``sigma = -1`` on type S stretches and ``+1`` on type T ones.
    """
    c = _unit(c)
    if grid is None and subinterval is not None:
        lo, hi = subinterval
        grid = c.grid(n_nodes, (lo, hi))
    s = _grid(c, grid, n_nodes)
    g = c.jet(s, 3)
    e = g.derivative().truncate(1)
    kv = g.derivative().derivative().truncate(1)
    theta = jets.inner(kv, kv)
    kn = mink3.euclid_norm(vec(kv.value))
    t = (mink3.DEFAULT_TOL if tol is None else tol) * max(1.0, float(np.max(kn)) ** 2)
    th = theta.value
    if np.all(th > t):
        sigma = -1
    elif np.all(th < -t):
        sigma = 1
    else:
        raise MixedCausality(f"{c.name}: theta is not of one sign on [{float(s[0]):.12g}, {float(s[-1]):.12g}]")
    kap = jets.sqrt(-sigma * theta)
    n = kv / kap
    b = jets.cross(e, n) * float(sigma)
    tau = jets.inner(n.derivative(), b.truncate(0)).value
    kap0 = kap.value
    E, N, B = vec(e.value), vec(n.value), vec(b.value)
    de, dn, db = vec(e.derivative().value), vec(n.derivative().value), vec(b.derivative().value)
    res = {
        "e": float(np.max(mink3.euclid_norm(de - kap0[:, None] * N))),
        "n": float(np.max(mink3.euclid_norm(dn - sigma * (kap0[:, None] * E + tau[:, None] * B)))),
        "b": float(np.max(mink3.euclid_norm(db - sigma * tau[:, None] * N))),
    }
    return FrenetApparatus(s, E, N, B, kap0, tau, sigma, res)


def _det_parts(c: UnitSpeedCurve, s):
    d = c.derivatives(np.asarray(s, dtype=float), 3)
    e, k, kp = vec(d[1]), vec(d[2]), vec(d[3])
    return mink3.scalar_triple(e, k, kp), mink3.square(k), mink3.euclid_norm(k)


def torsion_via_det(c, s, tol: float = mink3.DEFAULT_TOL):
    """``tau = -det(gamma', gamma'', gamma''') / theta``."""
    c = _unit(c)
    det, theta, kn = _det_parts(c, s)
    if np.any(np.abs(theta) <= tol * np.maximum(1.0, kn**2)):
        raise NearLightlike(f"{c.name}: theta is too close to 0 for the torsion")
    return -det / theta


def torsion_via_mu(theta, theta_prime, mu, eps: int = 1, tol: float = mink3.DEFAULT_TOL):
    """Torsion from ``theta``, ``theta'`` and the pseudo-torsion ``mu``.

    ``tau = -eps * (mu + theta' / (2 theta))``; with ``eps = +1`` this is the
    familiar ``-mu - theta'/(2 theta)``.  The factor ``eps`` is needed because
    ``mu`` does not change under an orientation-reversing isometry while the
    torsion does.
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) <= tol):
        raise NearLightlike("theta is too close to 0 for the torsion")
    return -eps * (np.asarray(mu, dtype=float) + np.asarray(theta_prime, dtype=float) / (2.0 * theta))


# pseudo-binormal frames

@dataclass
class PseudoFrame:
    s: np.ndarray
    e: np.ndarray
    kappa: np.ndarray
    beta: np.ndarray
    mu: np.ndarray
    eps: int
    valid: np.ndarray
    theta: np.ndarray
    theta_prime: np.ndarray
    kappa_prime: np.ndarray
    continuity: float = 0.0

    def frame(self) -> np.ndarray:
        return np.stack([self.e, self.kappa, self.beta], axis=-1)

    def relation_residuals(self, mask=None) -> dict[str, float]:
        m = self.valid if mask is None else mask
        e, k, b = self.e[m], self.kappa[m], self.beta[m]
        return {
            "beta_beta": float(np.max(np.abs(mink3.square(b)), initial=0.0)),
            "e_beta": float(np.max(np.abs(mink3.inner(e, b)), initial=0.0)),
            "kappa_beta": float(np.max(np.abs(mink3.inner(k, b) - 1.0), initial=0.0)),
            "det": float(np.max(np.abs(mink3.scalar_triple(e, k, b) - self.eps), initial=0.0)),
        }

    def ode_residual(self, mask=None) -> float:
        """Euclidean size of ``kappa' + theta e + mu kappa - (mu theta + theta'/2) beta``."""
        m = self.valid if mask is None else mask
        r = (self.kappa_prime + self.theta[:, None] * self.e + self.mu[:, None] * self.kappa
             - (self.mu * self.theta + 0.5 * self.theta_prime)[:, None] * self.beta)
        return float(np.max(mink3.euclid_norm(r[m]), initial=0.0))

    def mu_at(self, s0: float) -> float:
        i = int(np.argmin(np.abs(self.s - s0)))
        if self.s[i] == s0:
            return float(self.mu[i])
        return float(np.interp(s0, self.s, self.mu))


def _frame_data(c: UnitSpeedCurve, s: np.ndarray):
    d = c.derivatives(s, 3)
    e, k, kp = vec(d[1]), vec(d[2]), vec(d[3])
    return e, k, kp, mink3.square(k), 2.0 * mink3.inner(k, kp)


def _extrapolate(xs, ys, x):
    # cubic through 4 nodes, per component
    coef = np.polyfit(xs - xs.mean(), ys, 3)
    return np.stack([np.polyval(coef[:, j], x - xs.mean()) for j in range(ys.shape[1])], axis=-1)


def pseudo_frame_Lk(c, s0: float, eps: int | None = None, grid=None, n_nodes=None,
                    gap_tol: float = GAP_TOL) -> PseudoFrame:
    """Pseudo-binormal frame around the curvature-lightlike point ``s0``.

    ``beta = -(eps e x kappa - kappa) / theta`` where ``|theta|`` exceeds
    ``gap_tol * max|theta|``.  Inside that band the formula is 0/0; ``beta``
    is bridged by cubic extrapolation from 4 valid nodes on each side,
    averaging the two sides.
    """
    c = _unit(c)
    s = _grid(c, grid, n_nodes)
    if s[0] <= s0 <= s[-1] and not np.any(s == s0):
        s = np.sort(np.append(s, s0))
    if eps is None:
        eps = sign_epsilon(c, s0)
    e, k, kp, theta, theta_p = _frame_data(c, s)
    band = gap_tol * float(np.max(np.abs(theta)))
    gap = np.abs(theta) <= band
    beta = np.full_like(e, np.nan)
    ok = ~gap
    beta[ok] = -(eps * mink3.cross(e[ok], k[ok]) - k[ok]) / theta[ok, None]
    n = len(s)
    for a, b in _runs(gap):
        left = np.arange(a - 4, a)
        right = np.arange(b + 1, b + 5)
        if left[0] < 0 or right[-1] >= n or gap[left].any() or gap[right].any():
            raise GapTooWide(
                f"fewer than 4 valid nodes flank the lightlike band [{float(s[a]):.12g}, {float(s[b]):.12g}]"
            )
        x = s[a : b + 1]
        beta[a : b + 1] = 0.5 * (_extrapolate(s[left], beta[left], x) + _extrapolate(s[right], beta[right], x))
    mu = -mink3.inner(kp, beta)
    cont = 0.0
    for a, b in _runs(gap):
        lo, hi = max(a - 2, 0), min(b + 2, n - 1)
        local = np.abs(np.diff(mu[lo : hi + 1]))
        ref = np.abs(np.diff(mu[max(lo - 6, 0) : lo + 1]))
        cont = max(cont, float(local.max() - (ref.max() if ref.size else 0.0)))
    return PseudoFrame(s, e, k, beta, mu, int(eps), ok, theta, theta_p, kp, max(cont, 0.0))


def null_line_beta(e, kappa, eps: int) -> np.ndarray:
    """Pseudo-binormal from its defining conditions, without dividing by theta.

    ``beta`` lies on the null line of ``e``'s orthogonal plane on which
    ``e x`` acts as ``-eps``, scaled so that ``<kappa, beta> = 1``.
    """
    e = np.asarray(e, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    h = np.hypot(e[..., 0], e[..., 1])
    u = np.stack([-e[..., 1] / h, e[..., 0] / h, np.zeros_like(h)], axis=-1)
    line = u - eps * mink3.cross(e, u)
    return line / mink3.inner(kappa, line)[..., None]


def typeL_frame(c, grid=None, n_nodes=None, tol=None) -> PseudoFrame:
    """Frame ``(e, kappa, beta)`` and ``mu`` of a type L curve."""
    c = _unit(c)
    s = _grid(c, grid, n_nodes)
    e, k, kp, theta, theta_p = _frame_data(c, s)
    kn = mink3.euclid_norm(k)
    if np.any(kn <= mink3.DEFAULT_TOL):
        i = int(np.argmax(kn <= mink3.DEFAULT_TOL))
        raise ZeroCurvatureVector(float(s[i]), f"{c.name}: curvature vector vanishes at s={float(s[i]):.12g}")
    rel = default_theta_tol(c) if tol is None else tol
    if np.any(np.abs(theta) > rel * np.maximum(1.0, kn**2)):
        i = int(np.argmax(np.abs(theta)))
        raise NotTypeL(f"{c.name}: theta={theta[i]:.3g} at s={float(s[i]):.12g} is not zero")
    # e x kappa = eps kappa; read eps off the Euclidean direction
    eps = np.where(np.sum(mink3.cross(e, k) * k, axis=-1) >= 0, 1, -1)
    if np.any(eps != eps[0]):
        raise PreconditionViolation(f"{c.name}: the sign of e x kappa changes along the curve")
    eps0 = int(eps[0])
    beta = null_line_beta(e, k, eps0)
    mu = -mink3.inner(kp, beta)
    return PseudoFrame(s, e, k, beta, mu, eps0, np.ones(len(s), bool), theta, theta_p, kp)


def typeL_ode_residual(fr: PseudoFrame, c) -> float:
    """Residual of ``F' = F M`` with ``M = [[0,0,-1],[1,-mu,0],[0,0,mu]]`` via jets of beta."""
    c = _unit(c)
    s = fr.s
    g = c.jet(s, 3)
    e = g.derivative()
    k = e.derivative()
    h = jets.sqrt(e[0] * e[0] + e[1] * e[1])
    zero = jets.Jet.constant(0.0, h.order, h.shape)
    u = jets.stack([-e[1] / h, e[0] / h, zero])
    line = u - jets.cross(e.truncate(h.order), u) * float(fr.eps)
    beta = line / jets.inner(k.truncate(h.order), line)
    db = vec(beta.derivative().value)
    r_beta = db + fr.e - fr.mu[:, None] * fr.beta
    r_k = fr.kappa_prime + fr.mu[:, None] * fr.kappa
    return float(max(np.max(mink3.euclid_norm(r_beta)), np.max(mink3.euclid_norm(r_k))))


# torsion blow-up

def _neville(x: np.ndarray, y: np.ndarray, at: float = 0.0) -> float:
    p = list(map(float, y))
    x = list(map(float, x))
    n = len(p)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = ((at - x[i + m]) * p[i] + (x[i] - at) * p[i + 1]) / (x[i] - x[i + m])
    return p[0]


def blowup_coefficient(c, s0: float, k: int | None = None, gap_tol: float = GAP_TOL,
                       n_nodes=None, return_samples: bool = False):
    """Estimate ``lim (s - s0) tau(s)`` at an L_k point.

    Symmetric averages of ``d * tau(s0 +- d)`` are even in ``d`` and are
    extrapolated to ``d = 0`` in the variable ``d^2``.  Offsets ``d = 10^-m``
    (m = 2..5) are used unless ``theta`` there is inside the lightlike band;
    then offsets just outside the band are used instead.
    """
    c = _unit(c)
    a, b = c.domain
    scale = float(np.max(np.abs(theta_at(c, c.grid(n_nodes)))))
    band = gap_tol * scale

    def usable(d):
        if not (a < s0 - d and s0 + d < b):
            return False
        th = theta_at(c, np.array([s0 - d, s0 + d]))
        return bool(np.all(np.abs(th) > band))

    ds = [10.0**-m for m in range(2, 6) if usable(10.0**-m)]
    if len(ds) < 3:
        d = 1e-5
        limit = 0.25 * min(s0 - a, b - s0)
        while d < limit and not usable(d):
            d *= 1.25
        if d >= limit:
            raise NearLightlike(f"no evaluation offsets outside the lightlike band around s={float(s0):.12g}")
        ds = [1.5 * d * 2.0**j for j in range(4)]
        ds = [x for x in ds if x < limit]
        if len(ds) < 2:
            raise NearLightlike(f"not enough room around s={float(s0):.12g} to extrapolate the torsion")
    ds = np.array(sorted(ds))
    tp = torsion_via_det(c, s0 + ds)
    tm = torsion_via_det(c, s0 - ds)
    avg = 0.5 * (ds * tp - ds * tm)
    est = _neville(ds**2, avg)
    if return_samples:
        return est, ds, avg
    return est


# planarity

@dataclass
class PlanarityResult:
    planar: bool
    point: np.ndarray
    normal: np.ndarray
    normal_class: mink3.CausalClass
    residual: float
    span: float
    warnings: list[str] = field(default_factory=list)


def planarity_check(c, grid=None, n_nodes=None, profile: CausalCurvatureProfile | None = None,
                    tau_tol: float = 1e-6) -> PlanarityResult:
    """Least-squares plane through the curve, cross-checked against invariants.

    The plane's Lorentz normal is ``Z`` applied to its Euclidean normal.
    Any L_k point forces a non-planar verdict.
    """
    c = _unit(c)
    s = _grid(c, grid, n_nodes)
    pts = c.points(s)
    center = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - center, full_matrices=False)
    ne = vt[-1]
    residual = float(np.max(np.abs((pts - center) @ ne)))
    span = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
    planar = residual < 1e-8 * max(span, 1e-300)
    normal = mink3.Z @ ne
    normal = normal / np.linalg.norm(normal)
    lead = np.flatnonzero(np.abs(normal) > 1e-12)[0]
    if normal[lead] < 0:
        normal = -normal
    normal = normal + 0.0  # no negative zeros
    ncls = mink3.causal_class(normal, 1e-8)
    notes = []
    try:
        prof = profile if profile is not None else causal_curvature(c, grid=s)
    except Exception as exc:  # invariants are only a cross-check here
        notes.append(f"invariant cross-check skipped: {type(exc).__name__}: {exc}")
        prof = None
    if prof is not None:
        if prof.zeros:
            if planar:
                notes.append("geometric fit looks planar but the curve has L_k points; reporting non-planar")
            planar = False
        elif prof.all_lightlike:
            if planar and not ncls.lightlike:
                notes.append(f"type L curve lies in a plane whose normal is {ncls}, expected lightlike")
        else:
            try:
                tau = frenet_apparatus(c, grid=s).tau
                flat = float(np.max(np.abs(tau))) < tau_tol
                if flat != planar:
                    notes.append(f"geometric fit says planar={planar} but max|tau|={np.max(np.abs(tau)):.3g}")
            except Exception as exc:
                notes.append(f"Frenet cross-check skipped: {type(exc).__name__}")
    for n in notes:
        warnings.warn(n, stacklevel=2)
    return PlanarityResult(planar, center, normal, ncls, residual, span, notes)


# full analysis used by the CLI

@dataclass
class Analysis:
    curve: UnitSpeedCurve
    profile: CausalCurvatureProfile
    report: CurveTypeReport
    mu: np.ndarray
    tau: np.ndarray
    points: list[dict]
    planarity: PlanarityResult
    frames: PseudoFrame | FrenetApparatus | None = None


def analyze(c, grid=None, n_nodes=None, theta_tol=None, fit_window=None, gap_tol: float = GAP_TOL) -> Analysis:
    c = _unit(c)
    s = _grid(c, grid, n_nodes)
    prof = causal_curvature(c, grid=s, theta_tol=theta_tol, fit_window=fit_window)
    rep = classify(prof)
    nan = np.full(len(s), np.nan)
    mu, tau = nan.copy(), nan.copy()
    frames = None
    points = []
    if rep.tag in ("S", "T"):
        frames = frenet_apparatus(c, grid=s)
        tau = frames.tau
    elif rep.tag == "L":
        frames = typeL_frame(c, grid=s, tol=theta_tol)
        mu = frames.mu
    else:
        zs = np.array([z.s0 for z in prof.zeros])
        nearest = np.argmin(np.abs(s[:, None] - zs[None, :]), axis=1)
        for j, z in enumerate(prof.zeros):
            fr = pseudo_frame_Lk(c, z.s0, z.eps, grid=s, gap_tol=gap_tol)
            keep = fr.s != z.s0 if not np.any(s == z.s0) else np.ones(len(fr.s), bool)
            mu_j = fr.mu[keep]
            mu = np.where(nearest == j, mu_j, mu)
            if frames is None:
                frames = fr
            blow = blowup_coefficient(c, z.s0, z.k, gap_tol=gap_tol)
            points.append({"s0": z.s0, "k": z.k, "eps": z.eps, "mu_s0": fr.mu_at(z.s0), "blowup": blow})
        away = np.abs(prof.theta) > prof.theta_tol
        tau[away] = torsion_via_det(c, s[away], tol=0.0)
    plan = planarity_check(c, grid=s, profile=prof)
    return Analysis(c, prof, rep, mu, tau, points, plan, frames)
