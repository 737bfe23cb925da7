import math

import numpy as np
import pytest

from minkcurve import mink3
from minkcurve import invariants as inv
from minkcurve.curves import TransformedCurve, as_unit_speed, builtin
from minkcurve.errors import InvalidData, NotAFrame, ParseError, Singular, StepTooLarge
from minkcurve.mink3 import LorentzClass
from minkcurve.reconstruct import (
    AnchoredCurve,
    FrenetData,
    IntegrationConfig,
    TableFunction,
    TypeLData,
    TypeLkData,
    align_by_isometry,
    convergence,
    data_from_dict,
    data_to_dict,
    initial_frame,
    integrate,
    normalize_frame,
    roundtrip,
)

S0 = -math.sqrt((1 + math.sqrt(5)) / 2)
R2 = math.sqrt(0.5)


def lk(eps=1, theta="s", mu="cos(s)", domain=(-1, 1), s0=0.0):
    return TypeLkData(theta=theta, mu=mu, eps=eps, s0=s0, domain=domain)


# initial frames

@pytest.mark.parametrize("eps", [1, -1])
def test_initial_frame(eps):
    e = initial_frame(eps)
    assert np.linalg.det(e) == pytest.approx(eps, abs=1e-15)
    g = mink3.frame_gram(e)
    np.testing.assert_allclose(g, [[1, 0, 0], [0, 0, 1], [0, 1, 0]], atol=1e-15)


@pytest.mark.parametrize("sigma", [1, -1])
def test_primed_frames_map_to_standard(sigma):
    primed = np.array([[1, 0, 0], [0, -sigma * R2, -sigma * R2], [0, R2, -R2]])
    s = np.diag([1.0, -1.0, -1.0])
    np.testing.assert_allclose(s @ primed, initial_frame(sigma), atol=1e-15)


def test_initial_frame_rejects_bad_sign():
    with pytest.raises(ValueError):
        initial_frame(0)


# data validation

def test_identically_zero_theta_rejected():
    with pytest.raises(InvalidData, match="typeL"):
        integrate(lk(theta="0", mu="0"))


def test_theta_must_vanish_at_s0():
    with pytest.raises(InvalidData):
        integrate(lk(theta="s + 0.5"))


def test_multiple_zeros_flagged():
    data = lk(theta="s*(s - 0.5)", mu="0")
    with pytest.raises(InvalidData, match="further zeros"):
        integrate(data)
    res = integrate(data, allow_multiple_zeros=True)
    assert res.diagnostics["other_zeros"] == [pytest.approx(0.5)]


def test_config_validation():
    with pytest.raises(InvalidData):
        integrate(lk(), IntegrationConfig(h=0.2))
    with pytest.raises(InvalidData):
        integrate(lk(), IntegrationConfig(h=-1e-3))
    with pytest.raises(InvalidData):
        integrate(lk(), IntegrationConfig(stride=0))


def test_frenet_needs_positive_kappa():
    with pytest.raises(InvalidData):
        integrate(FrenetData("s", "0", -1, (-1, 1)))


def test_step_too_large():
    with pytest.raises(StepTooLarge):
        integrate(FrenetData("200", "0", -1, (0, 1)), IntegrationConfig(h=0.05))


@pytest.mark.parametrize("d", [
    {"kind": "Lk", "theta": "s", "mu": "0", "eps": 1},
    {"kind": "Lk", "theta": "s", "mu": "0", "s0": 0, "eps": 1, "kappa": "1", "domain": [-1, 1]},
    {"kind": "Frenet", "kappa": "1", "tau": "0", "sigma": 2},
    {"kind": "Q"},
    {"kind": "L", "mu": "0", "domain": [1]},
    [1, 2],
])
def test_schema_errors(d):
    with pytest.raises(InvalidData):
        data_from_dict(d)


def test_schema_expression_errors_keep_offset():
    with pytest.raises(ParseError) as exc:
        data_from_dict({"kind": "L", "mu": "sin("})
    assert exc.value.offset == 4


def test_schema_roundtrip():
    d = {"kind": "Lk", "theta": "s", "mu": {"table": {"s": [-1, -0.5, 0, 0.5, 1], "v": [0, 0.5, 1, 0.5, 0]}}, "eps": -1,
         "s0": 0.0, "domain": [-1.0, 1.0]}
    back = data_to_dict(data_from_dict(d))
    assert back["theta"] == "s" and back["mu"] == d["mu"] and back["eps"] == -1
    assert data_to_dict(data_from_dict(back)) == back


# round trips

@pytest.mark.parametrize("eps", [1, -1])
def test_Lk_roundtrip(eps):
    rep = roundtrip(lk(eps))
    assert rep["theta_error"] < 1e-6 and rep["mu_error"] < 1e-6
    assert rep["frame_drift"] < 1e-8
    assert rep["eps_hat"] == eps


def test_Lk_theta_s_mu_zero():
    rep = roundtrip(lk(theta="s", mu="0"))
    assert rep["theta_error"] < 1e-6 and rep["mu_error"] < 1e-6 and rep["eps_match"]


def test_frenet_roundtrip():
    rep = roundtrip(FrenetData("1", "0", -1, (-1, 1)))
    assert rep["kappa_error"] < 1e-8 and rep["tau_error"] < 1e-8 and rep["sigma_match"]
    rep = roundtrip(FrenetData("1 + 0.3*sin(s)", "0.5*s", 1, (-1, 1)))
    assert rep["kappa_error"] < 1e-6 and rep["tau_error"] < 1e-6 and rep["sigma_match"]


def test_typeL_roundtrip():
    rep = roundtrip(TypeLData("1", (-1, 1)))
    assert rep["theta_error"] < 1e-8 and rep["mu_error"] < 1e-6 and rep["eps_match"]


def test_convergence_order():
    out = convergence(lk())
    assert min(out["orders"]) >= 3.5
    for r in out["reports"]:
        assert r["eps_match"]


def test_drift_converges_at_fourth_order():
    drifts = [integrate(lk(), IntegrationConfig(h=h)).diagnostics["frame_drift"] for h in (2e-2, 1e-2, 5e-3)]
    orders = np.log2(np.array(drifts[:-1]) / np.array(drifts[1:]))
    assert np.all(orders > 3.5), orders


def test_projection_keeps_relations():
    raw = integrate(lk(), IntegrationConfig(h=1e-2)).diagnostics
    d = integrate(lk(), IntegrationConfig(h=1e-2, projection=True)).diagnostics
    # projection fixes e, <e,kappa> and beta; |kappa|^2 = theta is left to the scheme
    assert max(d["e_e"], d["e_kappa"], d["e_beta"], d["kappa_beta"], d["beta_beta"]) < 1e-13
    assert d["e_e"] < raw["e_e"]


def test_stride_keeps_anchor_and_ends():
    res = integrate(lk(), IntegrationConfig(h=1e-3, stride=7))
    assert res.s[0] == -1 and res.s[-1] == 1 and 0.0 in res.s
    full = integrate(lk())
    i = np.searchsorted(full.s, res.s)
    np.testing.assert_array_equal(full.points[i], res.points)


def test_table_functions():
    s = np.linspace(-1, 1, 401)
    data = lk(theta={"table": {"s": s.tolist(), "v": s.tolist()}},
              mu={"table": {"s": s.tolist(), "v": np.cos(s).tolist()}})
    assert isinstance(data.theta, TableFunction)
    rep = roundtrip(data)
    assert rep["theta_error"] < 1e-6 and rep["mu_error"] < 1e-6


# congruence

def _pair(eps, f0=None, data=None):
    res = integrate(data or lk(eps), initial=f0)
    return res, res.anchored()


def test_circle_and_hyperbola_congruence():
    for sigma, name in [(-1, "circle_S"), (1, "hyperbola_T")]:
        res = integrate(FrenetData("1", "0", sigma, (-1, 1), anchor=0.0))
        b = AnchoredCurve.from_curve(builtin(name, (-1, 1)), 0.0, kind="Frenet")
        al = align_by_isometry(res.anchored(), b)
        assert al.max_distance < 1e-8
        assert al.lorentz_class.proper


def test_parabola_congruence():
    par = as_unit_speed(builtin("parabola_L"))
    eps = inv.typeL_frame(par).eps
    res = integrate(TypeLData("0", (-1, 1), eps=eps, anchor=0.0))
    b = AnchoredCurve.from_curve(par, 0.0, kind="L")
    al = align_by_isometry(res.anchored(), b)
    assert al.max_distance < 1e-8 and al.lorentz_class.proper
    plan = inv.planarity_check(res.curve())
    assert plan.planar and plan.normal_class.lightlike


def test_typeL_output_is_lightlike_planar():
    res = integrate(TypeLData("1", (-1, 1)))
    plan = inv.planarity_check(res.curve())
    assert plan.planar and plan.normal_class.lightlike


def test_frenet_torsion_makes_curve_non_planar():
    res = integrate(FrenetData("1", "0.5", -1, (-1, 1)))
    assert not inv.planarity_check(res.curve()).planar


def test_uniqueness_up_to_isometry():
    rng = np.random.default_rng(11)
    r = mink3.random_sop21(rng, 1.0)
    _, a = _pair(1)
    _, b = _pair(1, r @ initial_frame(1))
    al = align_by_isometry(a, b)
    assert al.max_distance < 1e-6
    np.testing.assert_allclose(al.T, r, atol=1e-10)
    assert al.lorentz_class is LorentzClass.SOPLUS21


def test_rotated_initial_frame_rotates_curve():
    r = mink3.random_sop21(np.random.default_rng(2), 0.8)
    a, _ = _pair(-1)
    b, _ = _pair(-1, r @ initial_frame(-1))
    assert np.max(np.abs(a.points @ r.T - b.points)) < 1e-10


def test_opposite_signs_are_improperly_congruent():
    pa, a = _pair(1)
    pb, b = _pair(-1)
    al = align_by_isometry(a, b)
    assert al.max_distance < 1e-6
    assert al.lorentz_class is LorentzClass.O21
    ra, rb = roundtrip(lk(1), result=pa), roundtrip(lk(-1), result=pb)
    assert ra["theta_error"] < 1e-6 and rb["theta_error"] < 1e-6
    # no proper normalization maps one anchor frame to the other's normal form
    assert not normalize_frame(b.frame, 1).proper


def test_lopez_profile_reconstructs_lopez():
    lop = as_unit_speed(builtin("lopez_L1"))
    s = lop.grid()
    fr = inv.pseudo_frame_Lk(lop, S0, grid=s)
    data = TypeLkData({"table": {"s": fr.s.tolist(), "v": fr.theta.tolist()}},
                      {"table": {"s": fr.s.tolist(), "v": fr.mu.tolist()}},
                      fr.eps, S0, lop.domain)
    res = integrate(data, IntegrationConfig(h=1e-3))
    b = AnchoredCurve.from_curve(lop, S0)
    al = align_by_isometry(res.anchored(), b)
    assert al.max_distance < 1e-6
    assert al.lorentz_class.proper


# normal forms and alignment

@pytest.mark.parametrize("eps", [1, -1])
def test_normalize_identity(eps):
    n = normalize_frame(initial_frame(eps), eps)
    np.testing.assert_allclose(n.T, np.eye(3), atol=1e-14)
    assert n.orthochronous


def test_normalize_inverts_rotation():
    rng = np.random.default_rng(4)
    for _ in range(5):
        r = mink3.random_sop21(rng, 1.2)
        n = normalize_frame(r @ initial_frame(1), 1)
        np.testing.assert_allclose(n.T @ r, np.eye(3), atol=1e-9)
        np.testing.assert_allclose(n.T.T @ mink3.Z @ n.T, mink3.Z, atol=1e-9)
        assert np.linalg.det(n.T) == pytest.approx(1, abs=1e-9)
        assert n.lorentz_class is LorentzClass.SOPLUS21


def test_normalize_opposite_sign_is_improper():
    n = normalize_frame(initial_frame(-1), 1)
    np.testing.assert_allclose(n.T @ initial_frame(-1), initial_frame(1), atol=1e-14)
    assert n.lorentz_class is LorentzClass.O21
    assert not n.proper and np.linalg.det(n.T) == pytest.approx(-1)


def test_normalize_errors():
    with pytest.raises(Singular):
        normalize_frame(np.zeros((3, 3)), 1)
    with pytest.raises(NotAFrame):
        normalize_frame(np.eye(3), 1)


def test_align_identity_and_synthetic_pair():
    lop = as_unit_speed(builtin("lopez_L1"))
    a = AnchoredCurve.from_curve(lop, S0)
    same = align_by_isometry(a, a)
    np.testing.assert_allclose(same.T, np.eye(3), atol=1e-14)
    assert same.max_distance < 1e-15
    rng = np.random.default_rng(9)
    r, c = mink3.random_sop21(rng, 1.0), rng.uniform(-3, 3, 3)
    b = AnchoredCurve.from_curve(TransformedCurve(lop.curve, r, c), S0)
    al = align_by_isometry(a, b)
    np.testing.assert_allclose(al.T, r, atol=1e-10)
    np.testing.assert_allclose(al.translation, c, atol=1e-10)
    assert al.max_distance < 1e-10


def test_align_rejects_mismatched_anchors():
    lop = as_unit_speed(builtin("lopez_L1"))
    a = AnchoredCurve.from_curve(lop, S0)
    b = AnchoredCurve.from_curve(lop, -2.0, kind="Lk", eps=1)
    with pytest.raises(NotAFrame):
        align_by_isometry(a, b)
