"""Unicycle vehicle model: continuous dynamics, Euler step, rollout.

State z = (c1, c2, theta, v): position (N, E) in meters, heading in radians
with 0 = North and positive clockwise, and orbital velocity in m/s.  Input
u = (r, s): dimensionless throttle and spin in [-1, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import wrap_angle


@dataclass(frozen=True)
class VehicleState:
    c: tuple[float, float]
    theta: float
    v: float

    def __post_init__(self):
        c = (float(self.c[0]), float(self.c[1]))
        if not all(math.isfinite(x) for x in (*c, self.theta, self.v)):
            raise ValueError("vehicle state must be finite")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "theta", wrap_angle(float(self.theta)))
        object.__setattr__(self, "v", float(self.v))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c[0], self.c[1], self.theta, self.v)

    @classmethod
    def from_tuple(cls, z) -> "VehicleState":
        return cls((z[0], z[1]), z[2], z[3])


@dataclass(frozen=True)
class ControlInput:
    r: float
    s: float

    def __post_init__(self):
        r, s = float(self.r), float(self.s)
        if not (math.isfinite(r) and math.isfinite(s)):
            raise ValueError("control input must be finite")
        if abs(r) > 1.0 or abs(s) > 1.0:
            raise ValueError(f"throttle/spin must lie in [-1, 1], got ({r}, {s})")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", s)

    def as_tuple(self) -> tuple[float, float]:
        return (self.r, self.s)


@dataclass(frozen=True)
class ModelParams:
    """Tuning parameters: spin gain alpha (rad/s), throttle lag beta (1/s),
    top speed v_max (m/s), and sampling time T (s)."""

    alpha: float
    beta: float
    v_max: float
    T: float

    def __post_init__(self):
        if self.alpha < 0.0 or self.beta < 0.0 or self.v_max < 0.0:
            raise ValueError("alpha, beta, v_max must be nonnegative")
        if self.T <= 0.0:
            raise ValueError(f"sampling time must be positive, got {self.T}")


def derivative(z: VehicleState, u: ControlInput,
               m: ModelParams) -> tuple[float, float, float, float]:
    """Continuous-time state derivative (dc1, dc2, dtheta, dv)."""
    return (
        z.v * math.cos(z.theta),
        z.v * math.sin(z.theta),
        m.alpha * u.s,
        m.beta * (u.r * m.v_max - z.v),
    )


def euler_step(z: VehicleState, u: ControlInput, m: ModelParams) -> VehicleState:
    """One forward-Euler step z + T * dz, heading re-normalized."""
    dz = derivative(z, u, m)
    return VehicleState(
        (z.c[0] + m.T * dz[0], z.c[1] + m.T * dz[1]),
        z.theta + m.T * dz[2],
        z.v + m.T * dz[3],
    )


def rollout(z: VehicleState, u: ControlInput, m: ModelParams,
            i: int) -> VehicleState:
    """i-fold Euler composition under a constant input (i = 0 returns z)."""
    if i < 0:
        raise ValueError(f"substep count must be nonnegative, got {i}")
    for _ in range(i):
        z = euler_step(z, u, m)
    return z
