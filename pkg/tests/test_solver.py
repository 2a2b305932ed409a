"""Inner projected-gradient solver and augmented-Lagrangian outer loop."""

import math

import numpy as np
import pytest

from sepnav.solver import (
    FunctionProblem,
    SolverConfig,
    alm_solve,
    check_gradient,
    inner_solve,
    project_box,
    project_sphere_block,
)


def quadratic_problem(n=6, seed=0):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    Q = A.T @ A + n * np.eye(n)
    b = rng.normal(size=n)

    def fun(x):
        return 0.5 * float(x @ Q @ x) - float(b @ x), Q @ x - b

    return FunctionProblem(n, fun), np.linalg.solve(Q, b)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(epsilon=0.0)
    with pytest.raises(ValueError):
        SolverConfig(gamma=1.0)
    with pytest.raises(ValueError):
        SolverConfig(budget_ms=0.0)


def test_projections():
    assert np.array_equal(project_box([2.0, -3.0, 0.5], -1.0, 1.0),
                          [1.0, -1.0, 0.5])
    a = project_sphere_block(np.array([3.0, 4.0]), (1.0, 0.0))
    assert a == pytest.approx([0.6, 0.8], abs=1e-15)
    assert np.array_equal(
        project_sphere_block(np.zeros(2), (0.0, 1.0)), [0.0, 1.0])


def test_inner_solve_unconstrained_quadratic():
    problem, x_star = quadratic_problem()
    res = inner_solve(problem, np.zeros(problem.n), SolverConfig())
    assert res.converged
    assert res.x == pytest.approx(x_star, abs=1e-4)


def test_inner_solve_box_constrained():
    # minimize ||x - 2||^2 over the unit box: solution clamps to 1
    def fun(x):
        d = x - 2.0
        return float(d @ d), 2.0 * d

    problem = FunctionProblem(3, fun, project=lambda x: np.clip(x, -1, 1))
    res = inner_solve(problem, np.zeros(3), SolverConfig())
    assert res.converged
    assert res.x == pytest.approx(np.ones(3), abs=1e-8)


def test_inner_solve_never_increases_cost():
    problem, _ = quadratic_problem(seed=3)
    x0 = np.full(problem.n, 2.0)
    f0 = problem.cost(x0)
    res = inner_solve(problem, x0, SolverConfig(max_inner=4))
    assert res.cost <= f0 + 1e-12


def test_alm_analytic_oracle():
    # min ||x||^2 s.t. x1 >= 1 has solution (1, 0) with multiplier 2:
    # stationarity 2 x1 - y = 0 at the active constraint
    def fun(x):
        return float(x @ x), 2.0 * x

    def constraints(x):
        return np.array([1.0 - x[0]]), np.array([[-1.0, 0.0]])

    problem = FunctionProblem(2, fun, constraints=constraints, m=1)
    run = alm_solve(problem, np.array([-2.0, 3.0]),
                    cfg=SolverConfig(epsilon=1e-8, delta=1e-8, kappa=1e-6))
    assert run.converged
    assert run.x == pytest.approx([1.0, 0.0], abs=1e-3)
    assert run.y[0] == pytest.approx(2.0, abs=1e-2)


def test_alm_inactive_constraint_keeps_zero_multiplier():
    def fun(x):
        d = x - np.array([3.0, 0.0])
        return float(d @ d), 2.0 * d

    def constraints(x):
        return np.array([1.0 - x[0]]), np.array([[-1.0, 0.0]])

    problem = FunctionProblem(2, fun, constraints=constraints, m=1)
    run = alm_solve(problem, np.zeros(2), cfg=SolverConfig(epsilon=1e-8))
    assert run.converged
    assert run.x == pytest.approx([3.0, 0.0], abs=1e-4)
    assert run.y[0] == pytest.approx(0.0, abs=1e-8)
    assert run.violation == 0.0


def test_alm_without_constraints_reduces_to_inner():
    problem, x_star = quadratic_problem(seed=5)
    run = alm_solve(problem, np.zeros(problem.n))
    assert run.converged
    assert run.outer_iterations == 0
    assert run.x == pytest.approx(x_star, abs=1e-4)


def test_alm_respects_budget():
    problem, _ = quadratic_problem(n=40, seed=6)
    run = alm_solve(problem, np.zeros(problem.n),
                    cfg=SolverConfig(budget_ms=0.5, epsilon=1e-14))
    assert run.wall_ms < 100.0


def test_alm_warm_multipliers_accepted():
    def fun(x):
        return float(x @ x), 2.0 * x

    def constraints(x):
        return np.array([1.0 - x[0]]), np.array([[-1.0, 0.0]])

    problem = FunctionProblem(2, fun, constraints=constraints, m=1)
    run = alm_solve(problem, np.array([1.0, 0.0]), y0=np.array([2.0]),
                    cfg=SolverConfig(epsilon=1e-8, delta=1e-8, kappa=1e-6))
    assert run.converged
    with pytest.raises(ValueError):
        alm_solve(problem, np.zeros(2), y0=np.array([-1.0]))


def test_check_gradient_accepts_exact_and_flags_wrong():
    problem, _ = quadratic_problem(seed=7)
    assert check_gradient(problem, 20) < 1e-7

    def bad(x):
        return float(x @ x), 2.0 * x + 0.01

    assert check_gradient(FunctionProblem(4, bad), 5) > 1e-4


def test_check_gradient_covers_constraints():
    # a wrong constraint jacobian must be caught through the weighted cost
    def fun(x):
        return float(x @ x), 2.0 * x

    def bad_constraints(x):
        return np.array([1.0 - x[0]]), np.array([[-0.9, 0.0]])

    problem = FunctionProblem(2, fun, constraints=bad_constraints, m=1)
    assert check_gradient(problem, 20) > 1e-3
