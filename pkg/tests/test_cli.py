import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import lopez_tau
from minkcurve import curves, invariants
from minkcurve.cli import AnalysisReport, main, read_table


def run(*argv):
    return main([str(a) for a in argv])


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return path


def test_analyze_lopez(tmp_path, capsys, lopez_oracle):
    assert run("analyze", "--builtin", "lopez_l1", "--window", -2.5, -1.05, "--out", tmp_path) == 0
    assert "type Mixed" in capsys.readouterr().out
    rep = AnalysisReport.from_dict(json.loads((tmp_path / "report.json").read_text()))
    (p,) = rep.points
    assert p.k == 1 and abs(p.s0 - lopez_oracle["s0"]) < 1e-8
    assert abs(p.mu_s0 - lopez_oracle["mu_s0"]) < 1e-5 and abs(p.blowup + 0.5) < 1e-3
    assert p.eps in (1, -1) and not rep.planar
    header, table = read_table(tmp_path / "profile.csv")
    assert header == ["s", "theta", "theta_prime", "mu", "tau"]
    assert len(table) == rep.nodes
    assert not np.isnan(table[:, 3]).any()
    away = np.abs(table[:, 1]) > 1e-3
    assert np.max(np.abs(table[away, 4] - lopez_tau(table[away, 0]))) < 1e-6


def test_analyze_circle(tmp_path):
    assert run("analyze", "--builtin", "circle_S", "--out", tmp_path) == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["type"] == "S" and rep["planar"] and rep["normal_class"] == "Timelike"
    _, table = read_table(tmp_path / "profile.csv")
    assert np.max(np.abs(table[:, 4])) < 1e-12
    assert np.isnan(table[:, 3]).all()


def test_analyze_json_curve(tmp_path):
    spec = write_json(tmp_path / "helix.json", {"x": "cos(t)", "y": "sin(t)", "z": "0.5*t", "domain": [0, 2]})
    assert run("analyze", "--json", spec, "--out", tmp_path / "o") == 0
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep["type"] == "S" and not rep["planar"]


def test_analyze_sampled_csv(tmp_path):
    t = np.linspace(-1, 1, 401)
    path = tmp_path / "c.csv"
    curves.write_curve_csv(path, t, np.stack([np.cos(t), np.sin(t), 0 * t], -1))
    assert run("analyze", "--csv", path, "--out", tmp_path / "o") == 0
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep["type"] == "S" and rep["planar"]


def test_analyze_degenerate_csv(tmp_path, capsys):
    path = tmp_path / "noisy.csv"
    curves.write_curve_csv(path, np.arange(8.0), np.ones((8, 3)))
    assert run("analyze", "--csv", path, "--out", tmp_path) == 2
    assert "NonRegular" in capsys.readouterr().err


def test_analyze_missing_file(tmp_path, capsys):
    assert run("analyze", "--csv", tmp_path / "nope.csv") == 1
    assert "error" in capsys.readouterr().err


def test_analyze_unknown_builtin(capsys):
    assert run("analyze", "--builtin", "square") == 2


def test_env_tolerance(tmp_path, monkeypatch):
    monkeypatch.setenv("MINKCURVE_TOL", "abc")
    assert run("analyze", "--builtin", "circle_S", "--out", tmp_path) == 2
    monkeypatch.setenv("MINKCURVE_TOL", "1e-9")
    assert run("analyze", "--builtin", "circle_S", "--out", tmp_path) == 0


def test_report_roundtrip(tmp_path):
    run("analyze", "--builtin", "lopez_l1", "--out", tmp_path)
    text = (tmp_path / "report.json").read_text()
    rep = AnalysisReport.from_dict(json.loads(text))
    assert rep.dumps() == text
    assert AnalysisReport.from_dict(json.loads(rep.dumps())) == rep


def test_outputs_are_deterministic(tmp_path):
    for d in ("a", "b"):
        assert run("analyze", "--builtin", "angle_gen", "--out", tmp_path / d) == 0
    for f in ("report.json", "profile.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


LK = {"kind": "Lk", "theta": "s", "mu": "0", "eps": 1, "s0": 0, "domain": [-1, 1]}


def test_reconstruct_Lk(tmp_path):
    spec = write_json(tmp_path / "lk.json", LK)
    assert run("reconstruct", "--json", spec, "--out", tmp_path) == 0
    c = curves.read_curve_csv(tmp_path / "curve.csv")
    assert len(c.grid) == 2001
    header, fr = read_table(tmp_path / "frames.csv")
    assert header == ["s", "e1", "e2", "e3", "k1", "k2", "k3", "b1", "b2", "b3"]
    np.testing.assert_array_equal(fr[:, 0], c.grid)
    back = curves.as_unit_speed(curves.SampledCurve(c.grid, c.samples, fr[:, 1:4], fr[:, 4:7]))
    prof = invariants.causal_curvature(back, grid=c.grid)
    assert np.max(np.abs(prof.theta - c.grid)) < 1e-6
    assert [(z.k, z.eps) for z in prof.zeros] == [(1, 1)]
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["diagnostics"]["frame_drift"] < 1e-8


def test_reconstruct_L_and_frenet(tmp_path):
    spec = write_json(tmp_path / "l.json", {"kind": "L", "mu": "0"})
    assert run("reconstruct", "--json", spec, "--out", tmp_path / "l") == 0
    spec = write_json(tmp_path / "f.json", {"kind": "Frenet", "kappa": "1", "tau": "0", "sigma": -1})
    assert run("reconstruct", "--json", spec, "--out", tmp_path / "f", "--stride", 10) == 0
    c = curves.read_curve_csv(tmp_path / "f" / "curve.csv")
    r = np.linalg.norm(c.samples - c.samples.mean(axis=0), axis=1)
    # a unit circle arc through the origin, centred at (0, 1, 0)
    np.testing.assert_allclose(np.linalg.norm(c.samples - [0, 1, 0], axis=1), 1, atol=1e-10)
    assert r.max() > 0.4


def test_reconstruct_exit_codes(tmp_path, capsys):
    bad = write_json(tmp_path / "bad.json", {"kind": "Lk", "theta": "s"})
    assert run("reconstruct", "--json", bad, "--out", tmp_path) == 2
    assert "InvalidData" in capsys.readouterr().err
    (tmp_path / "broken.json").write_text("{")
    assert run("reconstruct", "--json", tmp_path / "broken.json") == 2
    steep = write_json(tmp_path / "steep.json", {"kind": "Frenet", "kappa": "200", "tau": "0", "sigma": -1,
                                                 "domain": [0, 1]})
    assert run("reconstruct", "--json", steep, "--h", 0.05, "--out", tmp_path) == 3
    assert "StepTooLarge" in capsys.readouterr().err


def test_roundtrip_steps(tmp_path, capsys):
    spec = write_json(tmp_path / "lk.json", {**LK, "mu": "cos(s)"})
    assert run("roundtrip", "--json", spec, "--steps", "1e-2,5e-3,2.5e-3", "--out", tmp_path) == 0
    out = capsys.readouterr().out
    assert "eps recovered: yes" in out
    header, table = read_table(tmp_path / "roundtrip.csv")
    assert header[-1] == "order"
    assert np.isnan(table[0, -1])
    assert np.all(np.abs(table[1:, -1] - 4) < 0.5)


@pytest.mark.parametrize("obj", [
    {"kind": "Lk", "theta": "s", "mu": "0", "eps": 1, "s0": 0, "sigma": 1},
    {"kind": "Frenet", "mu": "0"},
])
def test_roundtrip_schema_mismatch(tmp_path, capsys, obj):
    spec = write_json(tmp_path / "x.json", obj)
    assert run("roundtrip", "--json", spec, "--out", tmp_path) == 2
    assert "InvalidData" in capsys.readouterr().err


def test_identities(capsys):
    assert run("identities", "--seed", 42, "--trials", 2000) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 7 and "FAIL" not in out


def test_identities_injected_failure(capsys):
    assert run("identities", "--trials", 50, "--inject-failure", "vector_triple") != 0
    out = capsys.readouterr().out
    assert "FAIL vector_triple" in out and "counterexample" in out


def test_usage_errors(capsys):
    for argv in (["identities", "--trials", "0"], ["analyze"], ["bogus"], ["roundtrip", "--json", "x", "--steps", "1"]):
        with pytest.raises(SystemExit) as exc:
            run(*argv)
        assert exc.value.code == 64


def test_catalog(capsys):
    assert run("catalog") == 0
    lines = capsys.readouterr().out.splitlines()
    by_name = {ln.split()[0]: ln for ln in lines}
    assert "(-inf,-1), window default [-2.5,-1.05]" in by_name["lopez_L1"]
    assert "type L " in by_name["parabola_L"]
    assert "type S " in by_name["circle_S"]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "minkcurve", "catalog"], capture_output=True, text=True)
    assert p.returncode == 0 and "hyperbola_T" in p.stdout
