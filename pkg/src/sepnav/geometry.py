"""Planar superellipsoid sets, support functions, and separation certificates.

A superellipsoid is the image of the unit p-norm ball under an anisotropic
scaling, a rotation, and a translation.  Disjointness of two such sets is
certified by a separating axis: a unit vector along which the summed support
values plus the center offset are negative.  This module provides the exact
support-function formulas used by the planner together with brute-force
sampling oracles used for testing.

All values are immutable after construction and every operation is pure, so
geometry objects may be shared freely between concurrent solver instances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

UNIT_NORM_TOL = 1e-9
MEMBERSHIP_TOL = 1e-9


def wrap_angle(theta: float) -> float:
    """Normalize an angle into (-pi, pi]; exact on already-wrapped input."""
    if -math.pi < theta <= math.pi:
        return theta
    m = math.fmod(theta + math.pi, 2.0 * math.pi)
    if m <= 0.0:
        m += 2.0 * math.pi
    return m - math.pi


def rotation_matrix(theta: float) -> np.ndarray:
    """Elementary planar rotation matrix (determinant +1)."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def dual_exponent(p: float) -> float:
    """Conjugate exponent q = p/(p-1), satisfying 1/p + 1/q = 1.

    Only p >= 2 is admitted; smaller exponents would give nonconvex or
    nonsmooth sets.
    """
    if p < 2.0:
        raise ValueError(f"exponent must be >= 2, got {p}")
    return p / (p - 1.0)


@dataclass(frozen=True)
class Superellipsoid:
    """Rotated, scaled, translated unit p-norm ball in the plane.

    Attributes:
        center: center point (N, E) in meters.
        heading: rotation angle in radians, normalized into (-pi, pi].
        semi_axes: positive semi-axis lengths (s1, s2) in meters.
        exponent: p-norm exponent, >= 2 (p=2 is an ellipse; larger p
            approaches a rectangle).
    """

    center: tuple[float, float]
    heading: float
    semi_axes: tuple[float, float]
    exponent: float

    def __post_init__(self):
        c = (float(self.center[0]), float(self.center[1]))
        s = (float(self.semi_axes[0]), float(self.semi_axes[1]))
        if not all(math.isfinite(v) for v in (*c, self.heading, *s, self.exponent)):
            raise ValueError("superellipsoid parameters must be finite")
        if s[0] <= 0.0 or s[1] <= 0.0:
            raise ValueError(f"semi-axes must be positive, got {s}")
        if self.exponent < 2.0:
            raise ValueError(f"exponent must be >= 2, got {self.exponent}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "semi_axes", s)
        object.__setattr__(self, "heading", wrap_angle(float(self.heading)))

    @property
    def scale_matrix(self) -> np.ndarray:
        return np.diag(self.semi_axes)

    @property
    def rotation(self) -> np.ndarray:
        return rotation_matrix(self.heading)

    def at_pose(self, center, heading: float) -> "Superellipsoid":
        """Same shape rebound to a new pose (used for the vehicle template)."""
        return Superellipsoid((center[0], center[1]), heading, self.semi_axes,
                              self.exponent)

    def enlarged(self, delta: float) -> "Superellipsoid":
        """Shape with both semi-axes grown by delta >= 0 meters.

        Used to plan with a safety buffer around the true vehicle, so a
        certified (margin <= 0) plan keeps real clearance of at least
        delta against each obstacle.
        """
        if delta < 0.0:
            raise ValueError(f"enlargement must be >= 0, got {delta}")
        return Superellipsoid(self.center, self.heading,
                              (self.semi_axes[0] + delta,
                               self.semi_axes[1] + delta), self.exponent)

    def boundary_points(self, n: int) -> np.ndarray:
        """n points on the boundary, uniform in the signed-power angle.

        The unit p-ball boundary is parameterized by
        x(t) = (sign(cos t)|cos t|^(2/p), sign(sin t)|sin t|^(2/p)),
        which lies exactly on the boundary for every t, then mapped through
        the rotation/scaling and translated.
        """
        t = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        e = 2.0 / self.exponent
        ct, st = np.cos(t), np.sin(t)
        unit = np.stack(
            [np.sign(ct) * np.abs(ct) ** e, np.sign(st) * np.abs(st) ** e],
            axis=1,
        )
        return unit @ (self.rotation @ self.scale_matrix).T + np.asarray(self.center)


@dataclass(frozen=True)
class SeparatingAxis:
    """Unit vector along which separation of two sets is certified."""

    a: tuple[float, float]

    def __post_init__(self):
        a = (float(self.a[0]), float(self.a[1]))
        n = math.hypot(*a)
        if abs(n - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"separating axis must be unit-norm, |a| = {n}")
        object.__setattr__(self, "a", a)

    @classmethod
    def from_angle(cls, phi: float) -> "SeparatingAxis":
        return cls((math.cos(phi), math.sin(phi)))

    @classmethod
    def from_vector(cls, v) -> "SeparatingAxis":
        n = math.hypot(float(v[0]), float(v[1]))
        if n <= 0.0:
            raise ValueError("cannot normalize a zero vector")
        return cls((float(v[0]) / n, float(v[1]) / n))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.a)


def _axis_array(a) -> np.ndarray:
    v = a.as_array() if isinstance(a, SeparatingAxis) else np.asarray(a, dtype=float)
    n = float(np.hypot(v[0], v[1]))
    if abs(n - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"axis must be unit-norm, |a| = {n}")
    return v


def contains(X: Superellipsoid, x, tol: float = MEMBERSHIP_TOL) -> bool:
    """Membership test: true iff ||S^-1 R^T (x - c)||_p <= 1 + tol."""
    d = np.asarray(x, dtype=float) - np.asarray(X.center)
    y = (X.rotation.T @ d) / np.asarray(X.semi_axes)
    return float(np.sum(np.abs(y) ** X.exponent)) ** (1.0 / X.exponent) <= 1.0 + tol


def contains_many(X: Superellipsoid, pts: np.ndarray,
                  tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Vectorized membership over an (n, 2) point array."""
    d = np.asarray(pts, dtype=float) - np.asarray(X.center)
    y = d @ X.rotation / np.asarray(X.semi_axes)
    return np.sum(np.abs(y) ** X.exponent, axis=1) ** (1.0 / X.exponent) <= 1.0 + tol


def support(X: Superellipsoid, a) -> float:
    """Support function value sup_{x in X} <a, x>.

    For a centered superellipsoid this is the dual q-norm of S R^T a; the
    translation contributes <a, c>.  The direction is not required to be
    unit-norm.
    """
    a = np.asarray(a, dtype=float)
    return _support_centered(X, a) + float(a @ np.asarray(X.center))


def _support_centered(X: Superellipsoid, a: np.ndarray) -> float:
    q = dual_exponent(X.exponent)
    b = np.asarray(X.semi_axes) * (X.rotation.T @ a)
    return float(np.sum(np.abs(b) ** q)) ** (1.0 / q)


def separation_margin(V: Superellipsoid, E: Superellipsoid, a) -> float:
    """Separation certificate value for unit axis a.

    Returns ||S^v R^vT a||_q + ||S^e R^eT a||_q + <a, c^v - c^e>; a strictly
    negative value certifies that V and E are disjoint.  Both sets must share
    the same exponent (one p per scenario).
    """
    if V.exponent != E.exponent:
        raise ValueError(
            f"mixed exponents are not supported: {V.exponent} vs {E.exponent}")
    av = _axis_array(a)
    offset = float(av @ (np.asarray(V.center) - np.asarray(E.center)))
    return _support_centered(V, av) + _support_centered(E, av) + offset


def margin_sweep(V: Superellipsoid, E: Superellipsoid,
                 angular_resolution: float) -> tuple[np.ndarray, np.ndarray]:
    """Margins for axes (cos phi, sin phi) on a dense phi grid over [0, 2pi)."""
    if V.exponent != E.exponent:
        raise ValueError(
            f"mixed exponents are not supported: {V.exponent} vs {E.exponent}")
    if not 0.0 < angular_resolution <= 0.01:
        raise ValueError(
            f"angular resolution must be in (0, 0.01], got {angular_resolution}")
    q = dual_exponent(V.exponent)
    phis = np.arange(0.0, 2.0 * np.pi, angular_resolution)
    axes = np.stack([np.cos(phis), np.sin(phis)], axis=1)
    # rows of axes @ R S are S R^T a for each axis a
    bv = axes @ V.rotation * np.asarray(V.semi_axes)
    be = axes @ E.rotation * np.asarray(E.semi_axes)
    margins = (
        np.sum(np.abs(bv) ** q, axis=1) ** (1.0 / q)
        + np.sum(np.abs(be) ** q, axis=1) ** (1.0 / q)
        + axes @ (np.asarray(V.center) - np.asarray(E.center))
    )
    return phis, margins


def find_separating_axis(V: Superellipsoid, E: Superellipsoid,
                         angular_resolution: float = 0.005):
    """Best separating axis from a dense angle sweep, or None.

    Returns the axis of minimum margin when that margin is negative; None
    means the sweep found no separation certificate (the sets may or may not
    intersect -- use intersects_oracle for ground truth).
    """
    phis, margins = margin_sweep(V, E, angular_resolution)
    i = int(np.argmin(margins))
    if margins[i] < 0.0:
        return SeparatingAxis.from_angle(float(phis[i]))
    return None


def intersects_oracle(V: Superellipsoid, E: Superellipsoid,
                      samples: int = 20_000) -> bool:
    """Ground-truth collision check by dense sampling.

    Samples boundary points plus an interior grid of each set and tests the
    points against the other set's membership function.  True within sampling
    tolerance iff the sets intersect.
    """
    if samples < 10_000:
        raise ValueError(f"need at least 1e4 samples, got {samples}")
    return (_any_sample_inside(E, V, samples)
            or _any_sample_inside(V, E, samples))


def _sample_points(X: Superellipsoid, samples: int) -> np.ndarray:
    n_b = samples // 2
    boundary = X.boundary_points(n_b)
    # interior grid: radial shells of the boundary parameterization
    n_shells = max(2, int(math.sqrt(samples // 2)) // 2)
    n_ang = max(8, (samples - n_b) // n_shells)
    t = np.linspace(0.0, 2.0 * np.pi, n_ang, endpoint=False)
    e = 2.0 / X.exponent
    ct, st = np.cos(t), np.sin(t)
    unit = np.stack(
        [np.sign(ct) * np.abs(ct) ** e, np.sign(st) * np.abs(st) ** e], axis=1)
    radii = np.linspace(0.0, 1.0, n_shells + 1)[1:-1]
    interior = (radii[:, None, None] * unit[None, :, :]).reshape(-1, 2)
    interior = interior @ (X.rotation @ X.scale_matrix).T + np.asarray(X.center)
    center = np.asarray(X.center)[None, :]
    return np.concatenate([boundary, interior, center], axis=0)


def _any_sample_inside(source: Superellipsoid, target: Superellipsoid,
                       samples: int) -> bool:
    return bool(np.any(contains_many(target, _sample_points(source, samples))))
