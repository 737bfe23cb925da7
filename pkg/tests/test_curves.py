import math
import re

import numpy as np
import pytest

from minkcurve import curves, mink3
from minkcurve.curves import AnalyticCurve, SampledCurve, builtin, from_angles, reparametrize_arclength, vec
from minkcurve.errors import DegenerateVelocity, DerivativeUnavailable, NonRegular, NotSpacelike
from minkcurve.invariants import theta_at


@pytest.mark.parametrize("name", list(curves.BUILTINS))
def test_builtins_are_unit_speed(name):
    c = builtin(name)
    t = np.linspace(*c.domain, 401)
    e = vec(c.derivatives(t, 1)[1])
    assert np.max(np.abs(mink3.square(e) - 1)) < 1e-8
    assert reparametrize_arclength(c).identity


def test_builtin_lookup_is_case_insensitive():
    assert builtin("LOPEZ_l1").name == "lopez_L1"
    with pytest.raises(KeyError):
        builtin("nope")


def test_builtin_custom_window():
    assert builtin("circle_S", (0.0, 1.0)).domain == (0.0, 1.0)


@pytest.mark.parametrize("c, t, tag", [
    (builtin("circle_S"), 0.3, mink3.Causal.SPACELIKE),
    (AnalyticCurve("cosh(t)", "0", "sinh(t)", (-1, 1)), 0.0, mink3.Causal.TIMELIKE),
    (builtin("parabola_L"), 1.0, mink3.Causal.SPACELIKE),
])
def test_velocity_class(c, t, tag):
    assert curves.velocity_class(c, t).tag is tag


def test_velocity_class_sampled_needs_nodes():
    with pytest.raises(DerivativeUnavailable):
        SampledCurve(np.arange(4.0), np.zeros((4, 3)))


def test_curvature_vector_examples():
    np.testing.assert_allclose(curves.curvature_vector_general(builtin("circle_S"), 0.0), [-1, 0, 0], atol=1e-15)
    fast = AnalyticCurve("cos(2*t)", "sin(2*t)", "0", (-1, 1))
    np.testing.assert_allclose(curves.curvature_vector_general(fast, 0.0), [-1, 0, 0], atol=1e-14)
    s = np.linspace(-1, 1, 7)
    np.testing.assert_allclose(curves.curvature_vector_general(builtin("parabola_L"), s),
                               np.tile([0, 1, 1], (7, 1)), atol=1e-14)


def test_curvature_vector_degenerate():
    with pytest.raises(DegenerateVelocity):
        curves.curvature_vector_general(AnalyticCurve("t^3", "0", "0", (-1, 1)), 0.0)


def _substitute(expr: str, repl: str) -> str:
    return re.sub(r"\bs\b", f"({repl})", expr)


def test_curvature_vector_is_reparametrization_invariant():
    phi = "t + 0.2*sin(t)"
    xs = ("cos(s) + s*sin(s)", "sin(s) - s*cos(s)", "(s*sqrt(s^2 - 1) - log(abs(s + sqrt(s^2 - 1))))/2")
    slow = AnalyticCurve(*(_substitute(x, phi) for x in xs), (-2.3, -1.2))
    lopez = builtin("lopez_L1")
    t = np.linspace(-2.2, -1.3, 25)
    s = t + 0.2 * np.sin(t)
    k1 = curves.curvature_vector_general(slow, t)
    k2 = curves.curvature_vector_general(lopez, s)
    k3 = vec(lopez.derivatives(s, 2)[2])
    assert np.max(np.linalg.norm(k1 - k2, axis=-1)) < 1e-7
    assert np.max(np.linalg.norm(k2 - k3, axis=-1)) < 1e-12


def test_reparametrize_line():
    u = reparametrize_arclength(AnalyticCurve("2*t", "0", "0", (0, 1)))
    assert not u.identity
    t = np.linspace(0, 1, 11)
    np.testing.assert_allclose(u.s_of_t(t), 2 * t, atol=1e-12)
    np.testing.assert_allclose(u.points(np.array([0.5, 1.5])), [[0.5, 0, 0], [1.5, 0, 0]], atol=1e-12)


def test_reparametrize_circle():
    u = reparametrize_arclength(AnalyticCurve("cos(2*t)", "sin(2*t)", "0", (0, math.pi)))
    assert u.domain[1] - u.domain[0] == pytest.approx(2 * math.pi, abs=1e-10)
    s = np.linspace(*u.domain, 50)
    d = u.derivatives(s, 3)
    np.testing.assert_allclose(mink3.square(vec(d[1])), 1, atol=1e-10)
    np.testing.assert_allclose(vec(d[0]), np.stack([np.cos(s), np.sin(s), 0 * s], -1), atol=1e-9)
    np.testing.assert_allclose(vec(d[3]), np.stack([np.sin(s), -np.cos(s), 0 * s], -1), atol=1e-8)


def test_reparametrize_offsets_to_domain_start():
    u = reparametrize_arclength(AnalyticCurve("2*t", "0", "0", (1, 2)))
    assert u.domain == pytest.approx((1.0, 3.0))


def test_lopez_arclength_is_identity():
    c = builtin("lopez_L1")
    u = reparametrize_arclength(c)
    t = np.linspace(*c.domain, 9)
    assert np.ptp(u.s_of_t(t) - t) < 1e-8


def test_reparametrize_errors():
    with pytest.raises(NotSpacelike):
        reparametrize_arclength(AnalyticCurve("cosh(t)", "0", "sinh(t)", (-1, 1)))
    with pytest.raises(NonRegular):
        reparametrize_arclength(AnalyticCurve("t^3", "t^2", "0", (-1, 1)))
    with pytest.raises(ValueError):
        reparametrize_arclength(builtin("circle_S"), n_nodes=3)


def test_from_angles_circle():
    c = from_angles("0", "s", (0, 2 * math.pi))
    s = np.linspace(0, 2 * math.pi, 33)
    np.testing.assert_allclose(c.points(s), np.stack([np.sin(s), 1 - np.cos(s), 0 * s], -1), atol=1e-12)
    np.testing.assert_allclose(theta_at(c, s), 1, atol=1e-12)


def test_from_angles_timelike_curvature():
    c = from_angles("s", "0", (-1, 1), origin=(1, 2, 3), anchor=0.0)
    np.testing.assert_allclose(c.points(0.0), [1, 2, 3], atol=1e-15)
    np.testing.assert_allclose(theta_at(c, np.linspace(-1, 1, 9)), -1, atol=1e-12)
    np.testing.assert_allclose(c.points(1.0), [1 + math.sinh(1), 2, 3 + math.cosh(1) - 1], atol=1e-12)


def test_from_angles_theta_factorization():
    c = builtin("angle_gen")
    s = np.linspace(-1, 1, 201)
    a1 = s
    d1, d2 = np.ones_like(s), -1 + s
    fact = (d2 * np.cosh(a1) - d1) * (d2 * np.cosh(a1) + d1)
    assert np.max(np.abs(theta_at(c, s) - fact)) < 1e-8
    assert abs(theta_at(c, 0.0)) < 1e-15  # a1' + a2' cosh a1 = 0 at s = 0


def _sampled(n):
    t = np.linspace(0, 1.5, n)
    pts = np.stack([np.cos(t), np.sin(t), 0.5 * t * t], -1)
    return t, SampledCurve(t, pts)


def test_sampled_derivatives_converge():
    errs = []
    for n in (21, 41, 81, 161):
        t, c = _sampled(n)
        d = c.derivatives(t, 3)
        exact2 = np.stack([-np.cos(t), -np.sin(t), np.ones_like(t)])
        exact3 = np.stack([np.sin(t), -np.cos(t), 0 * t])
        errs.append([np.max(np.abs(d[2] - exact2)), np.max(np.abs(d[3] - exact3))])
    errs = np.array(errs)
    orders = np.log2(errs[:-1] / errs[1:])
    assert np.all(orders >= 1.8), orders


def test_sampled_interpolation_and_max_order():
    t, c = _sampled(161)
    q = np.array([0.3333, 1.2345])
    np.testing.assert_allclose(c.points(q), np.stack([np.cos(q), np.sin(q), 0.5 * q * q], -1), atol=1e-10)
    with pytest.raises(DerivativeUnavailable):
        c.derivatives(q, 4)


def test_sampled_validation():
    with pytest.raises(ValueError):
        SampledCurve([0, 1, 1, 2, 3], np.zeros((5, 3)))
    with pytest.raises(ValueError):
        SampledCurve(np.arange(5.0), np.zeros((5, 2)))


def test_csv_roundtrip(tmp_path):
    t, c = _sampled(30)
    path = tmp_path / "curve.csv"
    curves.write_curve_csv(path, t, c.samples)
    back = curves.read_curve_csv(path)
    np.testing.assert_array_equal(back.grid, t)
    np.testing.assert_array_equal(back.samples, c.samples)
    assert path.read_text().splitlines()[0] == "t,x,y,z"


def test_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c,d\n0,0,0,0\n")
    with pytest.raises(ValueError):
        curves.read_curve_csv(path)


def test_transformed_curve():
    r = mink3.boost_x(0.7) @ mink3.rotation_z(0.4)
    c = curves.TransformedCurve(builtin("circle_S"), r, (1, 2, 3))
    s = np.linspace(-1, 1, 5)
    np.testing.assert_allclose(c.points(s), builtin("circle_S").points(s) @ r.T + [1, 2, 3], atol=1e-14)
    e = vec(c.derivatives(s, 1)[1])
    np.testing.assert_allclose(mink3.square(e), 1, atol=1e-12)
