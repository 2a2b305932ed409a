"""Projected-gradient inner solver with an augmented-Lagrangian outer loop.

The feasible set is a box (inputs) times unit circles (separating axes),
both cheap to project onto. Inequality constraints G1(x) <= 0 are folded
into the cost through multipliers y and penalty rho; the multiplier drift
between outer iterations measures infeasibility and gates convergence.
"""

import math
import time
from dataclasses import dataclass, replace

import numpy as np

_STEP_MIN = 1e-14
_STEP_MAX = 1e12
_DECREASE = 1e-4
RHO_MAX = 1e12


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and budgets shared by the inner and outer loops."""

    epsilon: float = 1e-4
    delta: float = 1e-4
    kappa: float = 1e-3
    rho0: float = 10.0
    gamma: float = 5.0
    max_inner: int = 5000
    max_outer: int = 20
    budget_ms: float = math.inf

    def __post_init__(self):
        if self.epsilon <= 0 or self.delta <= 0 or self.kappa <= 0:
            raise ValueError("tolerances must be positive")
        if self.rho0 <= 0:
            raise ValueError(f"rho0 must be positive, got {self.rho0}")
        if self.gamma <= 1:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if self.max_inner < 1 or self.max_outer < 1:
            raise ValueError("iteration caps must be >= 1")
        if self.budget_ms <= 0:
            raise ValueError(f"budget_ms must be positive, got {self.budget_ms}")


@dataclass
class InnerResult:
    """Outcome of one projected-gradient solve."""

    x: np.ndarray
    cost: float
    grad_map: float
    iterations: int
    converged: bool
    wall_ms: float


@dataclass
class SolverRun:
    """Outcome of a full augmented-Lagrangian solve."""

    x: np.ndarray
    y: np.ndarray
    rho: float
    cost: float
    converged: bool
    infeasibility: float
    violation: float
    inner_iterations: int
    outer_iterations: int
    wall_ms: float


class FunctionProblem:
    """Problem assembled from plain callables, for tests and small models.

    `cost_and_grad(x) -> (value, gradient)`; optional `constraints(x) ->
    (values, jacobian)` with target set values <= 0; `project` defaults
    to the identity.
    """

    def __init__(self, n, cost_and_grad, project=None, constraints=None, m=0):
        self.n = int(n)
        self.m = int(m)
        self._fun = cost_and_grad
        self._project = project
        self._constraints = constraints
        if m > 0 and constraints is None:
            raise ValueError("m > 0 requires a constraints callable")

    def cost(self, x):
        return self._fun(np.asarray(x, dtype=float))[0]

    def cost_and_grad(self, x):
        return self._fun(np.asarray(x, dtype=float))

    def g1(self, x):
        if self.m == 0:
            return np.zeros(0)
        return np.asarray(self._constraints(np.asarray(x, dtype=float))[0])

    def al_eval(self, x, y, rho, want_grad=True):
        x = np.asarray(x, dtype=float)
        g, grad = self._fun(x)
        if self.m == 0:
            return g, g, np.zeros(0), (grad if want_grad else None)
        values, jac = self._constraints(x)
        values = np.asarray(values, dtype=float)
        shifted = values + np.asarray(y, dtype=float) / rho
        active = np.maximum(shifted, 0.0)
        psi = g + 0.5 * rho * float(active @ active)
        if want_grad:
            grad = grad + np.asarray(jac).T @ (rho * active)
        return g, psi, values, (grad if want_grad else None)

    def project(self, x):
        x = np.asarray(x, dtype=float)
        return x if self._project is None else self._project(x)


def project_box(x, lo, hi):
    """Elementwise clamp of x into [lo, hi]."""
    return np.clip(np.asarray(x, dtype=float), lo, hi)


def project_sphere_block(a, fallback):
    """Nearest unit vector to a; the fallback covers the degenerate origin."""
    a = np.asarray(a, dtype=float)
    norm = np.hypot(a[0], a[1])
    if norm > 1e-12:
        return a / norm
    return np.asarray(fallback, dtype=float)


class _AlmView:
    """Penalized cost seen by the inner solver at fixed (y, rho)."""

    __slots__ = ("base", "y", "rho")

    def __init__(self, base, y, rho):
        self.base = base
        self.y = y
        self.rho = rho

    def cost_and_grad(self, x):
        _, psi, _, grad = self.base.al_eval(x, self.y, self.rho, True)
        return psi, grad

    def trial_cost(self, x):
        fn = getattr(self.base, "al_trial", None)
        if fn is not None:
            return fn(x, self.y, self.rho)
        return self.base.al_eval(x, self.y, self.rho, False)[1]

    def project(self, x):
        return self.base.project(x)

    def precond_diag(self):
        fn = getattr(self.base, "precond_diag", None)
        return None if fn is None else fn()


def _lbfgs_direction(grad, mem, gamma):
    """Two-loop recursion; returns a descent direction approximating -H grad."""
    q = -grad.copy()
    alphas = []
    for s, yv, inv_sy in reversed(mem):
        a = inv_sy * float(s @ q)
        alphas.append(a)
        q -= a * yv
    q *= gamma
    for (s, yv, inv_sy), a in zip(mem, reversed(alphas)):
        b = inv_sy * float(yv @ q)
        q += (a - b) * s
    return q


def inner_solve(problem, x0, cfg):
    """Minimize a smooth cost over a projectable set.

    Limited-memory quasi-Newton directions with projection and a
    monotone backtracking line search; any step that fails to decrease
    the cost falls back to a projected gradient step with an adaptive
    (Barzilai-Borwein) step size. No iterate with increased cost is ever
    accepted. Stops when the gradient-mapping norm at the iterate falls
    below epsilon, or at the iteration/wall-clock budget (best iterate
    still returned).

    Line-search candidates are screened with trial_cost() when the
    problem provides it (an upper bound on the true cost suffices, and
    keeps expensive exact evaluations to one per iteration); the
    accepted point is always re-evaluated exactly.

    When the problem supplies precond_diag(), the iteration runs in
    diagonally rescaled coordinates (the stationarity measure included);
    the returned iterate is in original coordinates.
    """
    start = time.perf_counter()
    budget_s = cfg.budget_ms / 1000.0
    scale_fn = getattr(problem, "precond_diag", None)
    d_scale = scale_fn() if scale_fn is not None else None
    trial_fn = getattr(problem, "trial_cost", None)
    if trial_fn is None:
        trial_fn = problem.cost
    if d_scale is None:
        proj = problem.project
        cost_and_grad = problem.cost_and_grad
        trial = trial_fn
        x = proj(np.asarray(x0, dtype=float))
    else:
        d_scale = np.asarray(d_scale, dtype=float)

        def proj(z, _d=d_scale):
            return problem.project(_d * z) / _d

        def cost_and_grad(z, _d=d_scale):
            f_z, g_z = problem.cost_and_grad(_d * z)
            return f_z, g_z * _d

        def trial(z, _d=d_scale):
            return trial_fn(_d * z)

        x = proj(np.asarray(x0, dtype=float) / d_scale)
    f, grad = cost_and_grad(x)
    lam = 1.0
    gamma = 1.0
    mem = []
    iterations = 0
    crit = math.inf
    for iterations in range(1, cfg.max_inner + 1):
        if time.perf_counter() - start > budget_s:
            break
        accepted = False
        if mem:
            d = _lbfgs_direction(grad, mem, gamma)
            alpha = 1.0
            for _ in range(4):
                x_new = proj(x + alpha * d)
                step = x_new - x
                f_try = trial(x_new)
                if (f_try < f
                        and f_try <= f - _DECREASE * abs(float(grad @ step))):
                    accepted = True
                    break
                alpha *= 0.25
        if not accepted:
            # projected gradient fallback; always makes progress
            while True:
                x_new = proj(x - lam * grad)
                dd = float((x_new - x) @ (x_new - x))
                f_try = trial(x_new)
                if f_try <= f - _DECREASE * dd / lam:
                    accepted = True
                    break
                lam *= 0.5
                if lam < _STEP_MIN:
                    break
            if not accepted:
                break
        f_new, grad_new = cost_and_grad(x_new)
        # stationarity of the accepted iterate, measured at step <= 1
        lam_t = min(lam, 1.0)
        d_t = x_new - proj(x_new - lam_t * grad_new)
        crit = math.sqrt(float(d_t @ d_t)) / lam_t
        s = x_new - x
        yv = grad_new - grad
        sy = float(s @ yv)
        if sy > 1e-14:
            lam = min(max(float(s @ s) / sy, _STEP_MIN), _STEP_MAX)
            gamma = min(max(sy / float(yv @ yv), _STEP_MIN), _STEP_MAX)
            mem.append((s, yv, 1.0 / sy))
            if len(mem) > 10:
                mem.pop(0)
        else:
            lam = min(lam * 2.0, _STEP_MAX)
        x, f, grad = x_new, f_new, grad_new
        if crit <= cfg.epsilon:
            break
    if d_scale is not None:
        x = problem.project(d_scale * x)
    wall_ms = (time.perf_counter() - start) * 1e3
    return InnerResult(x=x, cost=f, grad_map=crit, iterations=iterations,
                       converged=crit <= cfg.epsilon, wall_ms=wall_ms)


def alm_solve(problem, x0, y0=None, cfg=None):
    """Solve min g(x) subject to G1(x) <= 0 over the projectable set.

    Each outer iteration minimizes the penalized cost at fixed (y, rho),
    then updates y <- max(y + rho * G1(x), 0). Converged when the inner
    criterion holds, the multiplier drift is at most kappa * rho, and no
    constraint is violated by more than delta. A problem without
    constraints reduces exactly to inner_solve.
    """
    if cfg is None:
        cfg = SolverConfig()
    start = time.perf_counter()
    x = problem.project(np.asarray(x0, dtype=float))
    m = problem.m
    if m == 0:
        res = inner_solve(problem, x, cfg)
        wall_ms = (time.perf_counter() - start) * 1e3
        return SolverRun(x=res.x, y=np.zeros(0), rho=0.0, cost=res.cost,
                         converged=res.converged, infeasibility=0.0,
                         violation=0.0, inner_iterations=res.iterations,
                         outer_iterations=0, wall_ms=wall_ms)
    y = np.zeros(m) if y0 is None else np.array(y0, dtype=float)
    if y.shape != (m,) or (y < 0).any():
        raise ValueError(f"y0 must be a nonnegative vector of length {m}")
    rho = cfg.rho0
    total_inner = 0
    converged = False
    infeasibility = math.inf
    violation = math.inf
    cost = math.nan
    outer = 0
    for outer in range(1, cfg.max_outer + 1):
        remaining = cfg.budget_ms - (time.perf_counter() - start) * 1e3
        if remaining <= 0:
            break
        res = inner_solve(_AlmView(problem, y, rho),
                          x, replace(cfg, budget_ms=remaining))
        x = res.x
        total_inner += res.iterations
        cost, _, g1_vals, _ = problem.al_eval(x, y, rho, want_grad=False)
        y_next = np.maximum(y + rho * g1_vals, 0.0)
        prev_violation = violation
        infeasibility = float(np.max(np.abs(y_next - y)))
        violation = float(max(np.max(g1_vals, initial=0.0), 0.0))
        y = y_next
        if (res.converged and infeasibility <= cfg.kappa * rho
                and violation <= cfg.delta):
            converged = True
            break
        # raise the penalty only while violation is out of tolerance and
        # multiplier updates alone are stalling
        if violation > cfg.delta and violation > 0.5 * prev_violation:
            rho = min(rho * cfg.gamma, RHO_MAX)
    wall_ms = (time.perf_counter() - start) * 1e3
    return SolverRun(x=x, y=y, rho=rho, cost=cost, converged=converged,
                     infeasibility=infeasibility, violation=violation,
                     inner_iterations=total_inner, outer_iterations=outer,
                     wall_ms=wall_ms)


def check_gradient(problem, points, step=1e-6, seed=0):
    """Max relative error between exact and central-difference gradients.

    Samples random decision points (projected onto the feasible set when
    the problem defines one). Problems with constraints are checked on
    the multiplier-weighted cost so the constraint gradients are covered.
    """
    if points < 1:
        raise ValueError(f"points must be >= 1, got {points}")
    rng = np.random.default_rng(seed)
    n = problem.n
    m = getattr(problem, "m", 0)
    worst = 0.0
    for _ in range(points):
        x = rng.uniform(-1.0, 1.0, n)
        if hasattr(problem, "project"):
            x = problem.project(x)
        if m > 0:
            y = rng.uniform(0.0, 1.0, m)

            def value(v, y=y):
                return problem.al_eval(v, y, 1.0, want_grad=False)[1]

            _, _, _, grad = problem.al_eval(x, y, 1.0, want_grad=True)
        else:

            def value(v):
                return problem.cost_and_grad(v)[0]

            _, grad = problem.cost_and_grad(x)
        fd = np.zeros(n)
        for i in range(n):
            e = np.zeros(n)
            e[i] = step
            fd[i] = (value(x + e) - value(x - e)) / (2.0 * step)
        denom = max(float(np.max(np.abs(grad))), 1.0)
        worst = max(worst, float(np.max(np.abs(fd - grad))) / denom)
    return worst
