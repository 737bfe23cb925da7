"""Seeded self-checks of the vector-product identities in L^3.

Integer trials are evaluated in int64 and must hold exactly; float trials
must hold to a residual of 1e-12.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mink3

FLOAT_TOL = 1e-12


@dataclass
class SuiteResult:
    name: str
    trials: int
    failures: int
    counterexample: dict | None = None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.trials - self.failures}/{self.trials}"


def _ints(rng, n):
    return rng.integers(-10, 11, size=(n, 3), dtype=np.int64)


def _result(name, ok, inputs, detail=None) -> SuiteResult:
    ok = np.asarray(ok)
    bad = np.flatnonzero(~ok)
    ce = None
    if bad.size:
        i = int(bad[0])
        ce = {k: np.asarray(v[i]).tolist() for k, v in inputs.items()}
        if detail is not None:
            ce["residual"] = float(np.asarray(detail)[i])
    return SuiteResult(name, len(ok), int(bad.size), ce)


def _inject(ok, name, inject):
    if inject == name:
        ok = np.array(ok, copy=True)
        ok[0] = False
    return ok


def run_identities(seed: int = 42, trials: int = 10_000, inject: str | None = None) -> list[SuiteResult]:
    """Run every suite with ``trials`` random cases each.

    ``inject`` names a suite whose first trial is forced to fail; it exists to
    test the reporting path.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    rng = np.random.default_rng(seed)
    out = []
    n = trials

    u, v, w = _ints(rng, n), _ints(rng, n), _ints(rng, n)
    args = {"u": u, "v": v, "w": w}

    ok = mink3.scalar_triple(u, v, w) == mink3.inner(u, mink3.cross(v, w))
    out.append(_result("scalar_triple", _inject(ok, "scalar_triple", inject), args))

    lhs = mink3.cross(u, mink3.cross(v, w))
    rhs = mink3.inner(u, v)[:, None] * w - mink3.inner(u, w)[:, None] * v
    ok = np.all(lhs == rhs, axis=-1)
    out.append(_result("vector_triple", _inject(ok, "vector_triple", inject), args))

    vw = mink3.cross(v, w)
    ok = mink3.inner(vw, vw) == -mink3.inner(v, v) * mink3.inner(w, w) + mink3.inner(v, w) ** 2
    out.append(_result("area_formula", _inject(ok, "area_formula", inject), {"v": v, "w": w}))

    ok = (mink3.inner(v, vw) == 0) & (mink3.inner(w, vw) == 0)
    out.append(_result("orthogonality", _inject(ok, "orthogonality", inject), {"v": v, "w": w}))

    # same identities in floating point
    fu, fv, fw = (rng.uniform(-1, 1, size=(n, 3)) for _ in range(3))
    fargs = {"u": fu, "v": fv, "w": fw}
    r1 = np.abs(mink3.scalar_triple(fu, fv, fw) - mink3.inner(fu, mink3.cross(fv, fw)))
    r2 = np.max(np.abs(mink3.cross(fu, mink3.cross(fv, fw))
                       - mink3.inner(fu, fv)[:, None] * fw + mink3.inner(fu, fw)[:, None] * fv), axis=-1)
    fvw = mink3.cross(fv, fw)
    r3 = np.abs(mink3.inner(fvw, fvw) + mink3.inner(fv, fv) * mink3.inner(fw, fw) - mink3.inner(fv, fw) ** 2)
    res = np.maximum(np.maximum(r1, r2), r3)
    out.append(_result("float_identities", _inject(res < FLOAT_TOL, "float_identities", inject), fargs, res))

    # equivariance: cross(Tv, Tw) = det(T) T cross(v, w)
    res = np.empty(n)
    flip = np.diag([1.0, 1.0, -1.0])
    ts = []
    for i in range(n):
        t = mink3.random_sop21(rng)
        if i % 2:
            t = t @ flip
        ts.append(t)
    ts = np.array(ts)
    tv = np.einsum("nij,nj->ni", ts, fv)
    tw = np.einsum("nij,nj->ni", ts, fw)
    rhs = np.linalg.det(ts)[:, None] * np.einsum("nij,nj->ni", ts, fvw)
    scale = np.max(np.abs(ts), axis=(1, 2)) ** 2
    res = np.max(np.abs(mink3.cross(tv, tw) - rhs), axis=-1) / scale
    out.append(_result("equivariance", _inject(res < FLOAT_TOL, "equivariance", inject),
                       {"T": ts, "v": fv, "w": fw}, res))

    # lightlike w orthogonal to spacelike v, built directly
    r = rng.uniform(0.5, 2.0, n)
    z = rng.uniform(-0.9, 0.9, n) * r
    phi = rng.uniform(0, 2 * np.pi, n)
    sv = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)
    e = sv / mink3.norm(sv)[:, None]
    h = np.hypot(e[:, 0], e[:, 1])
    uu = np.stack([-e[:, 1] / h, e[:, 0] / h, np.zeros(n)], axis=-1)
    sign = np.where(rng.random(n) < 0.5, 1.0, -1.0)
    lam = rng.uniform(0.5, 2.0, n)
    nw = lam[:, None] * (uu + sign[:, None] * mink3.cross(e, uu))
    c = mink3.cross(sv, nw)
    vn = mink3.norm(sv)[:, None]
    wn = np.linalg.norm(nw, axis=-1)
    res = np.minimum(np.linalg.norm(c - vn * nw, axis=-1), np.linalg.norm(c + vn * nw, axis=-1)) / wn
    got = np.array([mink3.lightlike_cross_sign(sv[i], nw[i], 1e-9) for i in range(n)])
    ok = (res <= FLOAT_TOL) & (got == sign)
    out.append(_result("lightlike_cross", _inject(ok, "lightlike_cross", inject), {"v": sv, "w": nw}, res))
    return out


SUITES = ("scalar_triple", "vector_triple", "area_formula", "orthogonality",
          "float_identities", "equivariance", "lightlike_cross")
