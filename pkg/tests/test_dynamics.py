"""Vehicle model: derivative formula, Euler stepping, rollout algebra."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sepnav.dynamics import (
    ControlInput,
    ModelParams,
    VehicleState,
    derivative,
    euler_step,
    rollout,
)

M = ModelParams(alpha=1.0, beta=0.2, v_max=1.0, T=0.1)


def test_state_validation_and_wrap():
    z = VehicleState((1.0, 2.0), 7.0, 0.5)
    assert -math.pi < z.theta <= math.pi
    with pytest.raises(ValueError):
        VehicleState((np.nan, 0.0), 0.0, 0.0)


def test_input_bounds():
    ControlInput(1.0, -1.0)
    with pytest.raises(ValueError):
        ControlInput(1.0001, 0.0)
    with pytest.raises(ValueError):
        ControlInput(0.0, np.inf)


def test_model_validation():
    with pytest.raises(ValueError):
        ModelParams(alpha=-1.0, beta=0.2, v_max=1.0, T=0.1)
    with pytest.raises(ValueError):
        ModelParams(alpha=1.0, beta=0.2, v_max=1.0, T=0.0)


def test_derivative_formula():
    z = VehicleState((0.0, 0.0), 0.3, 0.8)
    u = ControlInput(0.5, -0.25)
    dc1, dc2, dth, dv = derivative(z, u, M)
    assert math.isclose(dc1, 0.8 * math.cos(0.3), rel_tol=1e-15)
    assert math.isclose(dc2, 0.8 * math.sin(0.3), rel_tol=1e-15)
    assert math.isclose(dth, 1.0 * -0.25, rel_tol=1e-15)
    assert math.isclose(dv, 0.2 * (0.5 * 1.0 - 0.8), rel_tol=1e-15)


def test_euler_step_oracle():
    # coasting north at v=1 with zero input: position +0.1, speed decays
    # by beta*T to 0.98
    z = VehicleState((0.0, 0.0), 0.0, 1.0)
    z1 = euler_step(z, ControlInput(0.0, 0.0), M)
    assert z1.c == pytest.approx((0.1, 0.0), abs=1e-15)
    assert z1.theta == 0.0
    assert z1.v == pytest.approx(0.98, abs=1e-15)


def test_speed_decay_closed_form():
    # with r = 0 the speed recursion is linear: v_k = v0 (1 - beta T)^k
    z = VehicleState((0.0, 0.0), 1.1, 0.7)
    u = ControlInput(0.0, 0.0)
    zk = rollout(z, u, M, 25)
    assert zk.v == pytest.approx(0.7 * (1 - 0.02) ** 25, rel=1e-12)


def test_speed_converges_to_throttle_setpoint():
    z = VehicleState((0.0, 0.0), 0.0, 0.0)
    u = ControlInput(0.6, 0.0)
    zk = rollout(z, u, M, 2000)
    assert zk.v == pytest.approx(0.6, abs=1e-6)


def test_heading_integrates_spin():
    z = VehicleState((0.0, 0.0), 0.0, 0.0)
    zk = rollout(z, ControlInput(0.0, 0.5), M, 10)
    assert zk.theta == pytest.approx(1.0 * 0.5 * 0.1 * 10, rel=1e-12)


def test_rollout_composition():
    rng = np.random.default_rng(2)
    z = VehicleState((0.5, -0.5), 0.4, 0.3)
    u = ControlInput(0.8, -0.3)
    a = rollout(rollout(z, u, M, 3), u, M, 4)
    b = rollout(z, u, M, 7)
    assert a.as_tuple() == pytest.approx(b.as_tuple(), rel=1e-14)
    assert rollout(z, u, M, 0) is z
    with pytest.raises(ValueError):
        rollout(z, u, M, -1)


@given(
    st.floats(-1.0, 1.0), st.floats(-1.0, 1.0),
    st.floats(-math.pi, math.pi), st.floats(-1.0, 1.0),
)
def test_speed_stays_bounded(r, s, theta, v0):
    # |v| <= max(|v0|, v_max) is invariant under the discrete update
    z = VehicleState((0.0, 0.0), theta, v0)
    bound = max(abs(v0), M.v_max) + 1e-12
    for _ in range(50):
        z = euler_step(z, ControlInput(r, s), M)
        assert abs(z.v) <= bound


def test_tuple_round_trip():
    z = VehicleState((1.0, -2.0), 0.5, 0.25)
    assert VehicleState.from_tuple(z.as_tuple()) == z
