"""Command-line front end.

Exit codes: 0 success, 1 I/O error, 2 bad input or failed analysis,
3 integration failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import curves, identities, invariants, mink3, reconstruct
from .errors import InvalidData, MinkCurveError

EXIT_IO, EXIT_INPUT, EXIT_INTEGRATION, EXIT_USAGE = 1, 2, 3, 64


def fmt(x) -> str:
    """17 significant digits; empty for NaN."""
    x = float(x)
    return "" if math.isnan(x) else format(x, ".17g")


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_table(path) -> tuple[list[str], np.ndarray]:
    """Read a numeric CSV written by :func:`write_csv` (empty fields become NaN)."""
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        rows = [[float(v) if v != "" else math.nan for v in row] for row in r if row]
    return header, np.asarray(rows, dtype=float).reshape(-1, len(header))


@dataclass
class LkRecord:
    s0: float
    k: int
    eps: int
    mu_s0: float
    blowup: float


@dataclass
class AnalysisReport:
    curve: str
    type: str
    window: list[float]
    nodes: int
    points: list[LkRecord] = field(default_factory=list)
    intervals: list[list] = field(default_factory=list)
    planar: bool = False
    plane_normal: list[float] = field(default_factory=list)
    normal_class: str = ""
    plane_residual: float = 0.0
    warnings: list[str] = field(default_factory=list)
    profile: str = "profile.csv"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisReport":
        d = dict(d)
        d["points"] = [LkRecord(**p) for p in d.get("points", [])]
        return cls(**d)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {text}")
    return v


def _step_list(text):
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated steps, got {text!r}") from None
    if len(vals) < 2 or any(not v > 0 for v in vals):
        raise argparse.ArgumentTypeError("need at least two positive steps")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="minkcurve", description="Invariants and reconstruction of spacelike curves in L^3.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="compute invariants of a curve")
    src = a.add_mutually_exclusive_group(required=True)
    src.add_argument("--builtin", help="name from the catalog")
    src.add_argument("--csv", help="sampled curve with header t,x,y,z")
    src.add_argument("--json", help="analytic curve {x, y, z, domain, variable}")
    a.add_argument("--window", nargs=2, type=float, metavar=("A", "B"))
    a.add_argument("--nodes", type=_positive_int)
    a.add_argument("--tol", type=_positive_float, help="lightlike tolerance for theta")
    a.add_argument("--gap-tol", type=_positive_float, default=invariants.GAP_TOL)
    a.add_argument("--fit-window", type=_positive_float)
    a.add_argument("--out", default=".")

    r = sub.add_parser("reconstruct", help="integrate a curve from invariant data")
    r.add_argument("--json", required=True, help="invariant data")
    r.add_argument("--h", type=_positive_float, default=1e-3)
    r.add_argument("--projection", action="store_true")
    r.add_argument("--stride", type=_positive_int, default=1)
    r.add_argument("--out", default=".")

    t = sub.add_parser("roundtrip", help="reconstruct, re-analyse and compare")
    t.add_argument("--json", required=True, help="invariant data")
    t.add_argument("--h", type=_positive_float, default=1e-3)
    t.add_argument("--steps", type=_step_list, help="comma-separated steps for a refinement study")
    t.add_argument("--out", default=".")

    i = sub.add_parser("identities", help="run the seeded vector-identity suites")
    i.add_argument("--seed", type=int, default=42)
    i.add_argument("--trials", type=_positive_int, default=10_000)
    i.add_argument("--inject-failure", choices=identities.SUITES, help=argparse.SUPPRESS)

    sub.add_parser("catalog", help="list builtin curves")
    return p


def _env_tol():
    v = os.environ.get("MINKCURVE_TOL")
    if v is None:
        return None
    try:
        t = float(v)
    except ValueError:
        raise InvalidData(f"MINKCURVE_TOL={v!r} is not a number") from None
    if not t > 0:
        raise InvalidData("MINKCURVE_TOL must be positive")
    return t


def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidData(f"{path}: invalid JSON: {exc}") from None


def _load_curve(args) -> tuple[str, curves.ParamCurve]:
    if args.builtin:
        try:
            return args.builtin, curves.builtin(args.builtin, args.window)
        except KeyError as exc:
            raise InvalidData(exc.args[0]) from None
    if args.csv:
        c = curves.read_curve_csv(args.csv, name=Path(args.csv).name)
        if args.window:
            keep = (c.grid >= args.window[0]) & (c.grid <= args.window[1])
            c = curves.SampledCurve(c.grid[keep], c.samples[keep], name=c.name)
        return Path(args.csv).name, c
    d = _load_json(args.json)
    if not isinstance(d, dict) or not {"x", "y", "z", "domain"} <= set(d):
        raise InvalidData("curve JSON needs x, y, z and domain")
    dom = args.window or d["domain"]
    return Path(args.json).name, curves.AnalyticCurve(d["x"], d["y"], d["z"], dom, d.get("variable", "t"),
                                                       Path(args.json).stem)


def cmd_analyze(args) -> int:
    out = Path(args.out)
    name, c = _load_curve(args)
    tol = args.tol if args.tol is not None else _env_tol()
    causal = tol if tol is not None else mink3.DEFAULT_TOL
    u = curves.reparametrize_arclength(c, causal_tol=causal)
    grid = u.grid(args.nodes)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        an = invariants.analyze(u, grid=grid, theta_tol=tol, fit_window=args.fit_window, gap_tol=args.gap_tol)
    pl = an.planarity
    rep = AnalysisReport(
        curve=name,
        type=an.report.tag,
        window=[float(grid[0]), float(grid[-1])],
        nodes=int(len(grid)),
        points=[LkRecord(float(p["s0"]), int(p["k"]), int(p["eps"]), float(p["mu_s0"]), float(p["blowup"]))
                for p in an.points],
        intervals=[[float(a), float(b), t] for a, b, t in an.report.intervals],
        planar=bool(pl.planar),
        plane_normal=[float(x) for x in pl.normal],
        normal_class=pl.normal_class.tag.value,
        plane_residual=float(pl.residual),
        warnings=list(pl.warnings),
    )
    out.mkdir(parents=True, exist_ok=True)
    p = an.profile
    write_csv(out / "profile.csv", ["s", "theta", "theta_prime", "mu", "tau"],
              zip(p.s, p.theta, p.theta_prime, an.mu, an.tau))
    (out / "report.json").write_text(rep.dumps(), encoding="utf-8")
    labels = ", ".join(f"L{q.k} at s0={q.s0:.10g} (eps={q.eps:+d}, mu={q.mu_s0:.6g}, blowup={q.blowup:.6g})"
                       for q in rep.points)
    print(f"{name}: type {rep.type}" + (f"; {labels}" if labels else "")
          + f"; planar={rep.planar} (normal {rep.normal_class})")
    return 0


def _frames_rows(res):
    f = res.frames
    return (
        [s] + list(f[i, :, 0]) + list(f[i, :, 1]) + list(f[i, :, 2]) for i, s in enumerate(res.s)
    )


FRAME_HEADER = ["s", "e1", "e2", "e3", "k1", "k2", "k3", "b1", "b2", "b3"]


def cmd_reconstruct(args) -> int:
    out = Path(args.out)
    data = reconstruct.data_from_dict(_load_json(args.json))
    cfg = reconstruct.IntegrationConfig(h=args.h, projection=args.projection, stride=args.stride)
    res = reconstruct.integrate(data, cfg)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "curve.csv", ["s", "x", "y", "z"], ([s, *p] for s, p in zip(res.s, res.points)))
    write_csv(out / "frames.csv", FRAME_HEADER, _frames_rows(res))
    report = {
        "input": reconstruct.data_to_dict(data),
        "h": cfg.h,
        "projection": cfg.projection,
        "nodes": int(len(res.s)),
        "diagnostics": res.diagnostics,
        "curve": "curve.csv",
        "frames": "frames.csv",
    }
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"{data.kind}: {len(res.s)} nodes, frame drift {res.diagnostics['frame_drift']:.3g}")
    return 0


_RT_COLUMNS = {
    "Frenet": ["kappa_error", "tau_error"],
    "L": ["theta_error", "mu_error"],
    "Lk": ["theta_error", "mu_error"],
}


def cmd_roundtrip(args) -> int:
    out = Path(args.out)
    data = reconstruct.data_from_dict(_load_json(args.json))
    cols = _RT_COLUMNS[data.kind]
    steps = args.steps or [args.h]
    reports = [reconstruct.roundtrip(data, reconstruct.IntegrationConfig(h=h)) for h in steps]
    key = cols[0]
    orders = [math.nan]
    for r0, r1 in zip(reports[:-1], reports[1:]):
        e0, e1 = r0[key], r1[key]
        orders.append(math.log(e0 / e1) / math.log(r0["h"] / r1["h"]) if e0 > 0 and e1 > 0 else math.nan)
    header = ["h"] + cols + ["frame_drift", "unit_speed_drift", "order"]
    rows = [[r["h"]] + [r[c] for c in cols] + [r["frame_drift"], r["unit_speed_drift"], o]
            for r, o in zip(reports, orders)]
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "roundtrip.csv", header, rows)
    print("  ".join(f"{h:>22s}" for h in header))
    for row in rows:
        print("  ".join(f"{fmt(v) or '-':>22s}" for v in row))
    match_key = "sigma_match" if data.kind == "Frenet" else "eps_match"
    ok = all(r[match_key] for r in reports)
    print(f"{match_key.split('_')[0]} recovered: {'yes' if ok else 'NO'}")
    return 0 if ok else EXIT_INPUT


def cmd_identities(args) -> int:
    results = identities.run_identities(args.seed, args.trials, args.inject_failure)
    for r in results:
        print(r.line())
        if not r.passed:
            print(f"  counterexample: {json.dumps(r.counterexample)}")
    return 0 if all(r.passed for r in results) else EXIT_INPUT


def cmd_catalog(args) -> int:
    for b in curves.BUILTINS.values():
        print(f"{b.name:<12s} type {b.expected_type:<12s} domain {b.domain_note}; window [{b.window[0]:.6g}, {b.window[1]:.6g}]")
    return 0


COMMANDS = {
    "analyze": cmd_analyze,
    "reconstruct": cmd_reconstruct,
    "roundtrip": cmd_roundtrip,
    "identities": cmd_identities,
    "catalog": cmd_catalog,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except MinkCurveError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
