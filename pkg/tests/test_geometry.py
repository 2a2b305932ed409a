"""Superellipsoid geometry: support values, certificates, and oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sepnav.geometry import (
    SeparatingAxis,
    Superellipsoid,
    contains,
    contains_many,
    dual_exponent,
    find_separating_axis,
    intersects_oracle,
    margin_sweep,
    rotation_matrix,
    separation_margin,
    support,
    wrap_angle,
)


def random_shape(rng, p=None):
    return Superellipsoid(
        center=tuple(rng.uniform(-10.0, 10.0, 2)),
        heading=rng.uniform(-np.pi, np.pi),
        semi_axes=tuple(rng.uniform(0.3, 4.0, 2)),
        exponent=p if p is not None else rng.choice([2.0, 3.0, 4.0]),
    )


# --- angles and exponents ---


@given(st.floats(-50.0, 50.0))
def test_wrap_angle_range_and_equivalence(theta):
    w = wrap_angle(theta)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.sin(w), math.sin(theta), abs_tol=1e-9)
    assert math.isclose(math.cos(w), math.cos(theta), abs_tol=1e-9)


def test_wrap_angle_exact_on_wrapped_input():
    for theta in (0.0, 1.0, -1.0, math.pi, -math.pi + 1e-12):
        assert wrap_angle(theta) == theta


def test_rotation_matrix_orthonormal():
    R = rotation_matrix(0.7)
    assert np.allclose(R.T @ R, np.eye(2), atol=1e-15)
    assert math.isclose(float(np.linalg.det(R)), 1.0, abs_tol=1e-15)


def test_dual_exponent_conjugacy():
    for p in (2.0, 3.0, 4.0, 10.0):
        q = dual_exponent(p)
        assert math.isclose(1.0 / p + 1.0 / q, 1.0, rel_tol=1e-12)
    with pytest.raises(ValueError):
        dual_exponent(1.5)


# --- construction and membership ---


def test_shape_validation():
    with pytest.raises(ValueError):
        Superellipsoid((0, 0), 0.0, (1.0, -1.0), 3.0)
    with pytest.raises(ValueError):
        Superellipsoid((0, 0), 0.0, (1.0, 1.0), 1.0)
    with pytest.raises(ValueError):
        Superellipsoid((np.inf, 0), 0.0, (1.0, 1.0), 3.0)


def test_heading_normalized_on_construction():
    X = Superellipsoid((0, 0), 7.0, (1, 1), 3.0)
    assert -math.pi < X.heading <= math.pi


def test_boundary_points_are_members():
    rng = np.random.default_rng(3)
    for _ in range(20):
        X = random_shape(rng)
        pts = X.boundary_points(400)
        assert contains_many(X, pts, tol=1e-9).all()


def test_boundary_points_on_unit_level_set():
    rng = np.random.default_rng(4)
    for _ in range(20):
        X = random_shape(rng)
        d = X.boundary_points(200) - np.asarray(X.center)
        y = d @ X.rotation / np.asarray(X.semi_axes)
        r = np.sum(np.abs(y) ** X.exponent, axis=1)
        assert np.allclose(r, 1.0, atol=1e-9)


def test_contains_center_and_far_point():
    X = Superellipsoid((2, -1), 0.5, (1.5, 0.8), 3.0)
    assert contains(X, (2, -1))
    assert not contains(X, (10, 10))


def test_enlarged_grows_semi_axes():
    X = Superellipsoid((1, 2), 0.3, (1.0, 0.5), 3.0)
    Y = X.enlarged(0.25)
    assert Y.semi_axes == (1.25, 0.75)
    assert Y.center == X.center and Y.heading == X.heading
    with pytest.raises(ValueError):
        X.enlarged(-0.1)


# --- support function ---


def test_support_circle_oracle():
    # radius-3 disc: support along any direction is 3 plus the center term
    X = Superellipsoid((0, 0), 0.0, (3.0, 3.0), 2.0)
    for phi in (0.0, 0.7, 2.0, -1.3):
        a = (math.cos(phi), math.sin(phi))
        assert math.isclose(support(X, a), 3.0, rel_tol=1e-12)
    Y = Superellipsoid((1.0, -2.0), 0.0, (3.0, 3.0), 2.0)
    assert math.isclose(support(Y, (1.0, 0.0)), 4.0, rel_tol=1e-12)


def test_support_cube_norm_oracle():
    # unit p=3 ball along (1, 1): dual norm q = 3/2 gives (1+1)^(2/3)
    X = Superellipsoid((0, 0), 0.0, (1.0, 1.0), 3.0)
    assert math.isclose(support(X, (1.0, 1.0)), 2.0 ** (2.0 / 3.0),
                        rel_tol=1e-12)


def test_support_rotation_equivariance():
    rng = np.random.default_rng(5)
    base = Superellipsoid((0, 0), 0.0, (2.0, 1.1), 3.0)
    for _ in range(20):
        phi = rng.uniform(-np.pi, np.pi)
        a = rng.normal(size=2)
        rotated = Superellipsoid((0, 0), phi, (2.0, 1.1), 3.0)
        assert math.isclose(support(rotated, a),
                            support(base, rotation_matrix(phi).T @ a),
                            rel_tol=1e-12)


def test_support_dominates_boundary_samples():
    # support >= every sampled <a, x>, and is tight within 1e-3 relative
    rng = np.random.default_rng(6)
    for _ in range(50):
        X = random_shape(rng)
        pts = X.boundary_points(100_000)
        a = rng.normal(size=2)
        a /= np.hypot(a[0], a[1])
        sampled = float((pts @ a).max())
        val = support(X, a)
        assert val >= sampled - 1e-12
        assert val - sampled <= 1e-3 * max(1.0, abs(val))


# --- separation certificates ---


def test_separation_margin_matches_supports():
    rng = np.random.default_rng(7)
    for _ in range(20):
        V = random_shape(rng, p=3.0)
        E = random_shape(rng, p=3.0)
        a = SeparatingAxis.from_angle(rng.uniform(0, 2 * np.pi))
        av = a.as_array()
        expected = (support(V, av) - av @ np.asarray(V.center)
                    + support(E, av) - av @ np.asarray(E.center)
                    + av @ (np.asarray(V.center) - np.asarray(E.center)))
        assert math.isclose(separation_margin(V, E, a), expected,
                            rel_tol=1e-12)


def test_negative_margin_certifies_disjoint():
    # soundness on random pairs: margin < 0 never contradicts the oracle
    rng = np.random.default_rng(8)
    checked = 0
    for _ in range(300):
        p = float(rng.choice([2.0, 3.0, 4.0]))
        V = random_shape(rng, p=p)
        E = random_shape(rng, p=p)
        axis = find_separating_axis(V, E)
        if axis is None:
            continue
        assert separation_margin(V, E, axis) < 0.0
        assert not intersects_oracle(V, E)
        checked += 1
    assert checked > 50


def test_overlapping_pairs_have_no_negative_margin():
    # a shared point bounds every margin from below by zero
    rng = np.random.default_rng(9)
    for _ in range(50):
        V = random_shape(rng, p=3.0)
        E = Superellipsoid(V.center, rng.uniform(-np.pi, np.pi),
                           tuple(rng.uniform(0.3, 4.0, 2)), 3.0)
        phis, margins = margin_sweep(V, E, 0.01)
        assert margins.min() >= 0.0


def test_margin_sweep_matches_pointwise():
    V = Superellipsoid((0, 0), 0.4, (2.0, 1.1), 3.0)
    E = Superellipsoid((6, 1), -0.2, (1.5, 1.0), 3.0)
    phis, margins = margin_sweep(V, E, 0.01)
    for i in range(0, len(phis), 77):
        a = SeparatingAxis.from_angle(float(phis[i]))
        assert math.isclose(margins[i], separation_margin(V, E, a),
                            rel_tol=1e-12)


def test_separation_margin_rejects_mixed_exponents():
    V = Superellipsoid((0, 0), 0.0, (1, 1), 2.0)
    E = Superellipsoid((5, 0), 0.0, (1, 1), 3.0)
    with pytest.raises(ValueError):
        separation_margin(V, E, SeparatingAxis.from_angle(0.0))


def test_known_disjoint_pair_found():
    V = Superellipsoid((0, 0), 0.0, (1.0, 1.0), 3.0)
    E = Superellipsoid((5, 0), 0.0, (1.0, 1.0), 3.0)
    axis = find_separating_axis(V, E)
    assert axis is not None
    # gap along the line of centers: 5 - 1 - 1 = 3
    assert math.isclose(separation_margin(V, E, axis), -3.0, abs_tol=1e-3)
    assert not intersects_oracle(V, E)


def test_intersects_oracle_detects_overlap():
    V = Superellipsoid((0, 0), 0.0, (1.0, 1.0), 3.0)
    E = Superellipsoid((1.5, 0), 0.3, (1.0, 1.0), 3.0)
    assert intersects_oracle(V, E)


def test_vehicle_sized_touching_gap():
    # corridor-style clearance: boxes 2 apart with semi-axes 0.9 leave 0.2
    V = Superellipsoid((0, 0), 0.0, (0.9, 0.9), 4.0)
    E = Superellipsoid((2.0, 0), 0.0, (0.9, 0.9), 4.0)
    axis = find_separating_axis(V, E)
    assert axis is not None
    assert separation_margin(V, E, axis) == pytest.approx(-0.2, abs=1e-3)


# --- axes ---


def test_axis_unit_norm_enforced():
    with pytest.raises(ValueError):
        SeparatingAxis((1.0, 1.0))
    a = SeparatingAxis.from_vector((3.0, 4.0))
    assert math.isclose(math.hypot(*a.a), 1.0, abs_tol=1e-12)
    with pytest.raises(ValueError):
        SeparatingAxis.from_vector((0.0, 0.0))


@settings(max_examples=50)
@given(st.floats(0.0, 2.0 * math.pi))
def test_axis_from_angle_is_unit(phi):
    a = SeparatingAxis.from_angle(phi)
    assert math.isclose(math.hypot(*a.a), 1.0, abs_tol=1e-12)
