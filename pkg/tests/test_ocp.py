"""Transcription: dimensions, cost recomposition, margins, projections."""

import math

import numpy as np
import pytest

from sepnav.dynamics import ControlInput, ModelParams, VehicleState, rollout
from sepnav.geometry import SeparatingAxis, Superellipsoid, separation_margin
from sepnav.ocp import (
    HcWeights,
    LcWeights,
    ReferenceTarget,
    carrot_index,
    hc_stage_cost,
    hc_terminal_cost,
    lc_costs,
    transcribe_hc,
    transcribe_lc,
)

MODEL = ModelParams(alpha=1.0, beta=0.2, v_max=1.0, T=0.1)
TARGET = ReferenceTarget(c_ref=(-20.0, 6.0), theta_ref=0.0)
HC_W = HcWeights(q_c=1.0, q_theta=0.0, q_r=0.01, q_r_delta=0.0, q_s=0.5,
                 q_s_delta=0.0, q_c_final=20.0, q_theta_final=0.0,
                 horizon=5, substeps=10)
LC_W = LcWeights(q_c=100.0, q_theta=0.0, q_r=0.01, q_r_delta=0.0, q_s=0.1,
                 q_s_delta=0.0, q_c_peak=1000.0, q_theta_peak=0.0,
                 q_c_final=100.0, q_theta_final=0.0, horizon=10,
                 peak_stage=4)
VEHICLE = Superellipsoid((0, 0), 0.0, (2.0, 1.1), 3.0)
OBSTACLE = Superellipsoid((4.0, 1.0), 0.4, (1.5, 1.0), 3.0)
START = VehicleState((0.0, 0.0), 0.5, 0.6)


def hc_problem(tighten=0.0, obstacles=(OBSTACLE,)):
    return transcribe_hc(START, TARGET, obstacles, VEHICLE, HC_W, MODEL,
                         tighten=tighten)


class DummyPlan:
    """Minimal plan stand-in: an (H+1, 4) state table plus substeps."""

    def __init__(self, states, substeps=10, issued_tick=0):
        self._arr = np.asarray(states, dtype=float)
        self.substeps = substeps
        self.issued_tick = issued_tick

    def as_array(self):
        return self._arr


def straight_plan(n_stages=3, step=1.0):
    states = [(float(k) * step, 0.0, 0.0, 1.0) for k in range(n_stages + 1)]
    return DummyPlan(states)


# --- weights and frozen cost values ---


def test_weight_validation():
    with pytest.raises(ValueError):
        HcWeights(q_c=-1.0, q_theta=0, q_r=0, q_r_delta=0, q_s=0,
                  q_s_delta=0, q_c_final=0, q_theta_final=0, horizon=5,
                  substeps=10)
    with pytest.raises(ValueError):
        LcWeights(q_c=1, q_theta=0, q_r=0, q_r_delta=0, q_s=0, q_s_delta=0,
                  q_c_peak=1, q_theta_peak=0, q_c_final=1, q_theta_final=0,
                  horizon=10, peak_stage=10)


def test_hc_stage_cost_frozen():
    # q_c * 1^2 + q_r * 0.5^2 + q_s * 0.2^2 = 1 + 0.0025 + 0.02
    z = VehicleState((1.0, 0.0), 0.0, 0.0)
    ref = ReferenceTarget((0.0, 0.0), 0.0)
    w = HcWeights(q_c=1.0, q_theta=0.0, q_r=0.01, q_r_delta=0.0, q_s=0.5,
                  q_s_delta=0.0, q_c_final=20.0, q_theta_final=0.0,
                  horizon=5, substeps=10)
    u = ControlInput(0.5, 0.2)
    assert hc_stage_cost(0, z, u, ControlInput(0, 0), w, ref) \
        == pytest.approx(1.0225, abs=1e-15)
    assert hc_stage_cost(1, z, u, ControlInput(0, 0), w, ref) == 0.0
    assert hc_stage_cost(3, z, u, ControlInput(0, 0), w, ref) == 0.0


def test_hc_terminal_cost_frozen():
    z = VehicleState((2.0, 0.0), 0.0, 0.0)
    ref = ReferenceTarget((0.0, 0.0), 0.0)
    assert hc_terminal_cost(z, HC_W, ref) == pytest.approx(80.0, abs=1e-12)


def test_lc_peak_cost_frozen():
    # peak stage: q_c_peak * 0.1^2 = 10
    plan = straight_plan()
    z = VehicleState((1.1, 0.0), 0.0, 1.0)  # carrot at stage 1 is (1, 0)
    u = ControlInput(0.0, 0.0)
    val = lc_costs(LC_W.peak_stage, z, u, u, plan, LC_W)
    assert val == pytest.approx(1000.0 * 0.01, abs=1e-12)


def test_carrot_index_frozen():
    assert carrot_index(0, 10) == 1
    assert carrot_index(1, 10) == 1
    assert carrot_index(10, 10) == 1
    assert carrot_index(11, 10) == 2
    assert carrot_index(100, 10) == 10
    for k in range(0, 200, 7):
        assert carrot_index(k, 10) == max(1, math.ceil(k / 10))
    with pytest.raises(ValueError):
        carrot_index(-1, 10)


# --- transcription dimensions and layout ---


def test_hc_dimensions():
    problem = hc_problem()
    H = HC_W.horizon
    assert problem.n_inputs == 2 * H
    assert problem.m == H + 1
    assert problem.n == 2 * H + 2 * (H + 1)
    reduced = problem.reduced()
    assert reduced.n == 2 * H
    assert reduced.m == H  # stage-0 rows dropped


def test_hc_dimensions_multi_obstacle():
    obstacles = (OBSTACLE,
                 Superellipsoid((-4.0, -1.0), 0.0, (1.0, 1.0), 3.0),
                 Superellipsoid((0.0, 5.0), 1.0, (2.0, 0.5), 3.0))
    problem = hc_problem(obstacles=obstacles)
    assert problem.m == 3 * (HC_W.horizon + 1)
    assert problem.n == 2 * HC_W.horizon + 2 * problem.m


def test_lc_dimensions():
    problem = transcribe_lc(START, straight_plan(), LC_W, MODEL)
    assert problem.n == 2 * LC_W.horizon
    assert problem.m == 0


def test_mixed_exponent_rejected():
    bad = Superellipsoid((4.0, 1.0), 0.0, (1.0, 1.0), 2.0)
    with pytest.raises(ValueError):
        hc_problem(obstacles=(bad,))


# --- cost recomposition oracles ---


def test_hc_cost_matches_recomposition():
    # kernel cost == sum of stage costs over an independent Euler rollout
    rng = np.random.default_rng(10)
    problem = hc_problem()
    H, sub = HC_W.horizon, HC_W.substeps
    for _ in range(5):
        x = problem.project(rng.uniform(-1.0, 1.0, problem.n))
        inputs = x[:2 * H].reshape(H, 2)
        z = START
        expected = 0.0
        u_prev = ControlInput(0.0, 0.0)
        for t in range(H):
            u = ControlInput(*inputs[t])
            expected += hc_stage_cost(t, z, u, u_prev, HC_W, TARGET)
            z = rollout(z, u, MODEL, sub)
            u_prev = u
        expected += hc_terminal_cost(z, HC_W, TARGET)
        assert problem.cost(x) == pytest.approx(expected, rel=1e-12)


def test_lc_cost_matches_recomposition():
    rng = np.random.default_rng(11)
    plan = straight_plan()
    problem = transcribe_lc(START, plan, LC_W, MODEL)
    L = LC_W.horizon
    for _ in range(5):
        x = problem.project(rng.uniform(-1.0, 1.0, problem.n))
        inputs = x.reshape(L, 2)
        z = START
        expected = 0.0
        u_prev = ControlInput(0.0, 0.0)
        for k in range(L):
            u = ControlInput(*inputs[k])
            expected += lc_costs(k, z, u, u_prev, plan, LC_W)
            z = rollout(z, u, MODEL, 1)
            u_prev = u
        expected += lc_costs(L, z, ControlInput(0, 0), ControlInput(0, 0),
                             plan, LC_W)
        assert problem.cost(x) == pytest.approx(expected, rel=1e-12)


def test_hc_margins_match_geometry():
    # G1 rows == separation margins of the rolled-out poses, plus tighten
    rng = np.random.default_rng(12)
    tighten = 0.05
    problem = hc_problem(tighten=tighten)
    H, sub = HC_W.horizon, HC_W.substeps
    x = problem.project(rng.uniform(-1.0, 1.0, problem.n))
    inputs = x[:2 * H].reshape(H, 2)
    states = [START]
    for t in range(H):
        states.append(rollout(states[-1], ControlInput(*inputs[t]),
                              MODEL, sub))
    g1 = problem.g1(x)
    axes = x[2 * H:].reshape(H + 1, 2)
    for t in range(H + 1):
        pose = VEHICLE.at_pose(states[t].c, states[t].theta)
        margin = separation_margin(pose, OBSTACLE,
                                   SeparatingAxis(tuple(axes[t])))
        assert g1[t] == pytest.approx(margin + tighten, abs=1e-12)


def test_per_stage_tighten_applied():
    H = HC_W.horizon
    profile = np.linspace(0.0, 0.3, H + 1)
    p0 = hc_problem(tighten=0.0)
    pp = hc_problem(tighten=profile)
    rng = np.random.default_rng(13)
    x = p0.project(rng.uniform(-1.0, 1.0, p0.n))
    assert pp.g1(x) == pytest.approx(p0.g1(x) + profile, abs=1e-14)


def test_tighten_validation():
    with pytest.raises(ValueError):
        hc_problem(tighten=np.zeros(3))
    with pytest.raises(ValueError):
        hc_problem(tighten=-0.1)
    with pytest.raises(ValueError):
        hc_problem(tighten=np.full(HC_W.horizon + 1, np.nan))


# --- reduced problem ---


def test_reduced_resolves_margin_minimizing_axes():
    # the reduced view's margins lower-bound any explicit axis choice
    rng = np.random.default_rng(14)
    problem = hc_problem()
    reduced = problem.reduced()
    H = HC_W.horizon
    u = reduced.project(rng.uniform(-1.0, 1.0, reduced.n))
    tight = reduced.g1(u)
    for _ in range(10):
        phis = rng.uniform(0.0, 2 * np.pi, H + 1)
        axes = np.stack([np.cos(phis), np.sin(phis)], axis=1)
        x = np.concatenate([u, axes.ravel()])
        assert (tight <= problem.g1(x)[1:] + 1e-10).all()


def test_reduced_assemble_round_trip():
    rng = np.random.default_rng(15)
    problem = hc_problem()
    reduced = problem.reduced()
    u = reduced.project(rng.uniform(-1.0, 1.0, reduced.n))
    full = reduced.assemble(u)
    assert full.shape == (problem.n,)
    assert np.array_equal(full[:reduced.n], u)
    # assembled axes are unit vectors achieving the reduced margins
    axes = full[reduced.n:].reshape(-1, 2)
    assert np.allclose(np.hypot(axes[:, 0], axes[:, 1]), 1.0, atol=1e-9)
    assert problem.g1(full)[1:] == pytest.approx(reduced.g1(u), abs=1e-9)


def test_projection_clamps_and_normalizes():
    problem = hc_problem()
    x = np.full(problem.n, 5.0)
    out = problem.project(x)
    assert (np.abs(out[:problem.n_inputs]) <= 1.0).all()
    axes = out[problem.n_inputs:].reshape(-1, 2)
    assert np.allclose(np.hypot(axes[:, 0], axes[:, 1]), 1.0, atol=1e-12)
    # zero axis blocks fall back to the center-to-obstacle direction
    x = np.zeros(problem.n)
    out = problem.project(x)
    fallback = out[problem.n_inputs:problem.n_inputs + 2]
    d = np.array(OBSTACLE.center) - np.array(START.c)
    assert fallback == pytest.approx(d / np.hypot(*d), abs=1e-12)


def test_precond_diag_positive():
    hc = hc_problem().reduced()
    lc = transcribe_lc(START, straight_plan(), LC_W, MODEL)
    for problem in (hc, lc):
        d = problem.precond_diag()
        assert d.shape == (problem.n,)
        assert np.isfinite(d).all() and (d > 0).all()


# --- tracker references ---


def test_lc_references_follow_carrot():
    plan = straight_plan(n_stages=3)
    problem = transcribe_lc(START, plan, LC_W, MODEL)
    ref_c = problem._args[2]
    for k in range(LC_W.horizon + 1):
        t_k = min(3, carrot_index(k, plan.substeps))
        assert ref_c[k, 0] == pytest.approx(float(t_k), abs=1e-15)


def test_lc_age_shifts_references():
    plan = straight_plan(n_stages=3)
    aged = transcribe_lc(START, plan, LC_W, MODEL, age=10)
    ref_c = aged._args[2]
    for k in range(LC_W.horizon + 1):
        t_k = min(3, carrot_index(k + 10, plan.substeps))
        assert ref_c[k, 0] == pytest.approx(float(t_k), abs=1e-15)


def test_lc_rejects_short_plan():
    with pytest.raises(ValueError):
        transcribe_lc(START, straight_plan(n_stages=0), LC_W, MODEL)
    with pytest.raises(ValueError):
        transcribe_lc(START, straight_plan(), LC_W, MODEL, age=-1)
