"""Cost functions and single-shooting transcription of the planner and tracker.

Both control problems are reduced to a canonical form over the decision
vector alone: states are eliminated by forward simulation, so the smooth
cost, its exact gradient, and the separation-margin map are all functions
of the inputs (plus one unit axis per obstacle and stage for the planner).
Heavy evaluation is delegated to sepnav._kernels, which documents the
decision-vector layout.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import hc_eval, hc_eval_u, lc_eval
from .geometry import wrap_angle

# Added to every transcribed margin row so that any plan the solver deems
# feasible satisfies the true separation certificate with room to spare.
# The cost rides the tightened boundary wherever an obstacle blocks the
# way to the target, so this slack is also the planner's tolerance to
# state drift between replans: a drifted start state stays certifiable
# as long as its induced margin shift is below the tightening. The
# tracker follows a plan almost exactly on straights but cuts inside
# bends (its references jump ahead of real time by up to one planning
# stage, and shortening the arc is the only way to catch them), so the
# shift is best chosen per stage: this uniform value is only the default
# for callers that pass no profile.
MARGIN_TIGHTEN = 8e-2

_AXIS_EPS = 1e-12
_EMPTY = np.zeros(0)


def _require_nonnegative(name, value):
    if not math.isfinite(value) or value < 0.0:
        raise ValueError(f"{name} must be finite and >= 0, got {value}")


def _require_bound(name, value):
    if not 0.0 < value <= 1.0:
        raise ValueError(f"{name} must lie in (0, 1], got {value}")


def _pulse_response(g, mm):
    """Saturation curve of a decaying unit pulse, per remaining horizon.

    A pulse whose effect retains factor g each step displaces the state
    by 1 - g**j after j steps. Returns (sat, s1) where sat = 1 - g**m
    and s1 = sum_{j=1..m} (1 - g**j)**2 in closed form, elementwise over
    the array mm of remaining-step counts.
    """
    if not 0.0 <= g < 1.0:
        return np.zeros_like(mm), np.zeros_like(mm)
    gm = g ** mm
    sat = 1.0 - gm
    s1 = (mm - 2.0 * g * (1.0 - gm) / (1.0 - g)
          + g * g * (1.0 - gm * gm) / (1.0 - g * g))
    return sat, s1


@dataclass(frozen=True)
class HcWeights:
    """Planner cost weights, horizon, substep ratio, and input bounds."""

    q_c: float
    q_theta: float
    q_r: float
    q_r_delta: float
    q_s: float
    q_s_delta: float
    q_c_final: float
    q_theta_final: float
    horizon: int
    substeps: int
    r_max: float = 1.0
    s_max: float = 1.0

    def __post_init__(self):
        for name in ("q_c", "q_theta", "q_r", "q_r_delta", "q_s",
                     "q_s_delta", "q_c_final", "q_theta_final"):
            _require_nonnegative(name, getattr(self, name))
        if self.horizon < 2:
            raise ValueError(f"horizon must be >= 2, got {self.horizon}")
        if self.substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {self.substeps}")
        _require_bound("r_max", self.r_max)
        _require_bound("s_max", self.s_max)

    def packed(self):
        """Weight vector in the kernel's expected order."""
        return np.array([self.q_c, self.q_theta, self.q_r, self.q_r_delta,
                         self.q_s, self.q_s_delta, self.q_c_final,
                         self.q_theta_final])


@dataclass(frozen=True)
class LcWeights:
    """Tracker cost weights, horizon, and the high-weighted stage index."""

    q_c: float
    q_theta: float
    q_r: float
    q_r_delta: float
    q_s: float
    q_s_delta: float
    q_c_peak: float
    q_theta_peak: float
    q_c_final: float
    q_theta_final: float
    horizon: int
    peak_stage: int

    def __post_init__(self):
        for name in ("q_c", "q_theta", "q_r", "q_r_delta", "q_s", "q_s_delta",
                     "q_c_peak", "q_theta_peak", "q_c_final",
                     "q_theta_final"):
            _require_nonnegative(name, getattr(self, name))
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if not 0 <= self.peak_stage <= self.horizon - 1:
            raise ValueError(
                f"peak_stage must lie in [0, {self.horizon - 1}], "
                f"got {self.peak_stage}")

    def packed(self):
        """Weight vector in the kernel's expected order."""
        return np.array([self.q_c, self.q_theta, self.q_r, self.q_r_delta,
                         self.q_s, self.q_s_delta, self.q_c_peak,
                         self.q_theta_peak, self.q_c_final,
                         self.q_theta_final])


@dataclass(frozen=True)
class ReferenceTarget:
    """Goal pose the planner steers toward, in (North, East) meters."""

    c_ref: tuple
    theta_ref: float = 0.0

    def __post_init__(self):
        c = tuple(float(v) for v in self.c_ref)
        if len(c) != 2 or not all(math.isfinite(v) for v in c):
            raise ValueError(f"c_ref must be a finite 2-vector, got {self.c_ref}")
        if not math.isfinite(self.theta_ref):
            raise ValueError("theta_ref must be finite")
        object.__setattr__(self, "c_ref", c)
        object.__setattr__(self, "theta_ref", wrap_angle(self.theta_ref))


class OcpProblem:
    """Immutable transcribed program in the solver's canonical form.

    Exposes the smooth cost g, its exact gradient, the inequality map G1
    (target set: nonpositive orthant), and projection onto the feasible
    set (input box plus one unit circle per separating axis).
    """

    def __init__(self, kind, n_inputs, m, lo, hi, args, fallbacks=None):
        self.kind = kind
        self.n_inputs = int(n_inputs)
        self.m = int(m)
        self.lo = lo
        self.hi = hi
        self._args = args
        self._fallbacks = fallbacks
        if fallbacks is None:
            self.n = self.n_inputs
            self._fallback_rows = None
        else:
            self.n = self.n_inputs + 2 * m
            stages = m // fallbacks.shape[0]
            self._fallback_rows = np.repeat(fallbacks, stages, axis=0)
        self._zero_y = np.zeros(self.m)

    def _vec(self, x):
        x = np.ascontiguousarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(
                f"decision vector has shape {x.shape}, expected ({self.n},)")
        return x

    def _eval(self, x, y, rho, want_grad):
        x = self._vec(x)
        if self.kind == "hc":
            return hc_eval(x, *self._args, y, rho, want_grad)
        g, grad = lc_eval(x, *self._args, want_grad)
        return g, g, _EMPTY, grad

    def cost(self, x):
        """Smooth cost g at x."""
        return self._eval(x, self._zero_y, 0.0, False)[0]

    def cost_and_grad(self, x):
        """Smooth cost and its exact gradient."""
        g, _, _, grad = self._eval(x, self._zero_y, 0.0, True)
        return g, grad

    def g1(self, x):
        """Stacked separation margins; feasible iff every entry <= 0."""
        return np.asarray(self._eval(x, self._zero_y, 0.0, False)[2])

    def al_eval(self, x, y, rho, want_grad=True):
        """Augmented-Lagrangian value psi, plus g, G1, and grad of psi."""
        y = np.ascontiguousarray(y, dtype=float)
        if y.shape != (self.m,):
            raise ValueError(
                f"multiplier vector has shape {y.shape}, expected ({self.m},)")
        g, psi, G1, grad = self._eval(x, y, float(rho), want_grad)
        return g, psi, np.asarray(G1), grad

    def project(self, x):
        """Project onto the feasible set: clamp inputs, normalize axes."""
        out = np.array(self._vec(x))
        ni = self.n_inputs
        np.clip(out[:ni], self.lo, self.hi, out=out[:ni])
        if self.m:
            axes = out[ni:].reshape(-1, 2)
            norms = np.hypot(axes[:, 0], axes[:, 1])
            bad = norms <= _AXIS_EPS
            norms[bad] = 1.0
            axes /= norms[:, None]
            if bad.any():
                axes[bad] = self._fallback_rows[bad]
        return out

    def reduced(self):
        """Inputs-only view with axes resolved inside the evaluation."""
        if self.kind != "hc":
            return self
        return ReducedHcProblem(self)

    def precond_diag(self):
        """Inverse-curvature input scaling, or None when not applicable.

        Only the tracking problem (a plain input box) is scaled here; the
        planning problem carries axis blocks whose curvature depends on
        the penalty weight, so its full layout is left unscaled.
        """
        if self.kind != "lc":
            return None
        w, alpha, beta, v_max, T, L, peak = self._args[4:11]
        mm = np.arange(L, 0, -1, dtype=float)
        ahead = np.maximum(mm - (L - peak), 0.0)
        sat, s1 = _pulse_response(1.0 - beta * T, mm)
        sat_peak = _pulse_response(1.0 - beta * T, ahead)[0]
        unit_r = T * v_max
        curv_r = w[0] * s1 + w[6] * sat_peak ** 2 + w[8] * sat ** 2
        h_r = 2.0 * (w[2] + 2.0 * w[3] + unit_r * unit_r * curv_r)
        gain_s = alpha * T * T * v_max
        curv_s = w[0] * mm ** 3 / 3.0 + w[6] * ahead ** 2 + w[8] * mm ** 2
        h_s = 2.0 * (w[4] + 2.0 * w[5] + gain_s * gain_s * curv_s)
        d = np.empty(2 * L)
        d[0::2] = 1.0 / np.sqrt(np.maximum(h_r, 1e-12))
        d[1::2] = 1.0 / np.sqrt(np.maximum(h_s, 1e-12))
        return d


class ReducedHcProblem:
    """Inputs-only view of a transcribed planning problem.

    Margin rows keep their meaning, but each row's separating axis is
    resolved internally to the margin-minimizing unit direction, so G1
    holds the tightest certifiable margins and the decision vector is
    just the 2H inputs (a plain box). Because the augmented-Lagrangian
    penalty increases with each margin, minimizers and multiplier
    updates coincide with the full problem's; gradients are taken at
    the resolved axes (envelope property). assemble() lifts a solution
    back to the full decision-vector layout.

    Stage-0 margin rows are excluded: the initial state is fixed, so no
    input influences them, and keeping an (occasionally) unsatisfiable
    constant row would stall the multiplier loop. Constraints cover the
    controllable stages 1..H.
    """

    def __init__(self, parent):
        self.kind = "hc"
        self.n_inputs = parent.n_inputs
        self.n = parent.n_inputs
        self.lo = parent.lo
        self.hi = parent.hi
        self._args = parent._args
        self._zero_y = parent._zero_y
        self._parent = parent
        self._axes = None
        H = self._args[9]
        n_obs = parent.m // (H + 1)
        self.m = parent.m - n_obs
        self._keep = np.ones(parent.m, dtype=bool)
        self._keep[[j * (H + 1) for j in range(n_obs)]] = False

    def _eval(self, x, y, rho, want_grad):
        x = np.ascontiguousarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(
                f"decision vector has shape {x.shape}, expected ({self.n},)")
        out = hc_eval_u(x, *self._args, y, rho, want_grad)
        self._axes = np.asarray(out[3])
        return out

    def _lift_y(self, y):
        """Multipliers padded with zeros on the excluded stage-0 rows."""
        y = np.ascontiguousarray(y, dtype=float)
        if y.shape != (self.m,):
            raise ValueError(
                f"multiplier vector has shape {y.shape}, expected ({self.m},)")
        full = np.zeros(self._parent.m)
        full[self._keep] = y
        return full

    def cost(self, x):
        """Smooth cost g at x."""
        return self._eval(x, self._zero_y, 0.0, False)[0]

    def cost_and_grad(self, x):
        """Smooth cost and its exact gradient."""
        g, _, _, _, grad = self._eval(x, self._zero_y, 0.0, True)
        return g, grad

    def g1(self, x):
        """Tightest separation margins; feasible iff every entry <= 0."""
        return np.asarray(self._eval(x, self._zero_y, 0.0, False)[2])[self._keep]

    def al_eval(self, x, y, rho, want_grad=True):
        """Augmented-Lagrangian value psi, plus g, G1, and grad of psi."""
        y_full = self._lift_y(y)
        g, psi, G1, _, grad = self._eval(x, y_full, float(rho), want_grad)
        return g, psi, np.asarray(G1)[self._keep], grad

    def assemble(self, x):
        """Full decision vector: the inputs with the resolved axes appended."""
        x = np.ascontiguousarray(x, dtype=float)
        axes = self._eval(x, self._zero_y, 0.0, False)[3]
        return np.concatenate([x, np.asarray(axes)])

    def al_trial(self, x, y, rho):
        """Cheap upper bound on the penalized cost at x.

        Margins are evaluated at the axes resolved by the most recent
        eval instead of re-minimizing over axes. Any fixed unit axes
        overestimate the minimized margins, and the penalty grows with
        each margin, so the bound is safe for a monotone line search;
        at the point the axes came from it is exact to first order.
        """
        y_full = self._lift_y(y)
        if self._axes is None:
            return self._eval(x, y_full, rho, False)[1]
        full_x = np.concatenate([np.ascontiguousarray(x, dtype=float),
                                 self._axes])
        return self._parent.al_eval(full_x, y_full, rho, want_grad=False)[1]

    def project(self, x):
        """Clamp the inputs onto their box."""
        x = np.ascontiguousarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(
                f"decision vector has shape {x.shape}, expected ({self.n},)")
        return np.clip(x, self.lo, self.hi)

    def precond_diag(self):
        """Inverse-curvature input scaling for the input box.

        A throttle pulse bumps the speed and the bump decays at rate
        (1 - beta*T) per step, so its position effect saturates; a
        steering pulse turns the heading once and displaces every later
        position in proportion to the distance still to travel, so its
        curvature grows like the cube of the remaining horizon. Scaling
        each input by the inverse square root of the resulting estimate
        evens out the conditioning, which the limited-memory inner
        solver needs on long horizons.
        """
        w, alpha, beta, v_max, T, H, tau = self._args[4:11]
        mm = np.arange(H, 0, -1, dtype=float)
        sat, s1 = _pulse_response((1.0 - beta * T) ** tau, mm)
        unit_r = tau * T * v_max
        curv_r = w[0] * s1 + w[6] * sat ** 2
        h_r = 2.0 * (w[2] + 2.0 * w[3] + unit_r * unit_r * curv_r)
        gain_s = alpha * (tau * T) ** 2 * v_max
        curv_s = w[0] * mm ** 3 / 3.0 + w[6] * mm * mm
        h_s = 2.0 * (w[4] + 2.0 * w[5] + gain_s * gain_s * curv_s)
        d = np.empty(2 * H)
        d[0::2] = 1.0 / np.sqrt(np.maximum(h_r, 1e-12))
        d[1::2] = 1.0 / np.sqrt(np.maximum(h_s, 1e-12))
        return d


def hc_stage_cost(t, z, u, u_prev, w, ref):
    """Planner stage cost; zero at every odd stage."""
    if t % 2 == 1:
        return 0.0
    dc1 = z.c[0] - ref.c_ref[0]
    dc2 = z.c[1] - ref.c_ref[1]
    dth = wrap_angle(z.theta - ref.theta_ref)
    return (w.q_c * (dc1 * dc1 + dc2 * dc2) + w.q_theta * dth * dth
            + w.q_r * u.r ** 2 + w.q_r_delta * (u.r - u_prev.r) ** 2
            + w.q_s * u.s ** 2 + w.q_s_delta * (u.s - u_prev.s) ** 2)


def hc_terminal_cost(z_h, w, ref):
    """Planner terminal cost at the final rollout state."""
    dc1 = z_h.c[0] - ref.c_ref[0]
    dc2 = z_h.c[1] - ref.c_ref[1]
    dth = wrap_angle(z_h.theta - ref.theta_ref)
    return w.q_c_final * (dc1 * dc1 + dc2 * dc2) + w.q_theta_final * dth * dth


def carrot_index(k, tau):
    """Plan stage tracked by tracker stage k: max(1, ceil(k / tau))."""
    if k < 0:
        raise ValueError(f"stage must be >= 0, got {k}")
    if tau < 1:
        raise ValueError(f"substep ratio must be >= 1, got {tau}")
    return max(1, -(-k // tau))


def lc_costs(k, z, u, u_prev, plan, w):
    """Tracker cost at stage k against the plan's carrot state.

    k == horizon evaluates the terminal cost (inputs are ignored there).
    """
    states = plan.as_array()
    t_k = min(states.shape[0] - 1, carrot_index(k, plan.substeps))
    dc1 = z.c[0] - states[t_k, 0]
    dc2 = z.c[1] - states[t_k, 1]
    dth = wrap_angle(z.theta - states[t_k, 2])
    pos = dc1 * dc1 + dc2 * dc2
    if k == w.horizon:
        return w.q_c_final * pos + w.q_theta_final * dth * dth
    if k == w.peak_stage:
        qc, qth = w.q_c_peak, w.q_theta_peak
    else:
        qc, qth = w.q_c, w.q_theta
    return (qc * pos + qth * dth * dth
            + w.q_r * u.r ** 2 + w.q_r_delta * (u.r - u_prev.r) ** 2
            + w.q_s * u.s ** 2 + w.q_s_delta * (u.s - u_prev.s) ** 2)


def _state_vec(state):
    return np.array([state.c[0], state.c[1], state.theta, state.v])


def _input_vec(u):
    return np.zeros(2) if u is None else np.array([u.r, u.s])


def transcribe_hc(state, target, obstacles, vehicle, w, model,
                  u_prev=None, tighten=MARGIN_TIGHTEN):
    """Transcribe the planning problem around the given initial state.

    Decision vector: 2H inputs followed by one axis pair per obstacle and
    stage (obstacle-major). The margin stack G1 must end up elementwise
    nonpositive; `tighten` shifts each row to leave slack below zero,
    either one value for all rows or a per-stage array of length H + 1.
    """
    for j, e in enumerate(obstacles):
        if e.exponent != vehicle.exponent:
            raise ValueError(
                f"obstacle {j} exponent {e.exponent} differs from vehicle "
                f"exponent {vehicle.exponent}")
    H = w.horizon
    n_obs = len(obstacles)
    m = n_obs * (H + 1)
    lo = np.tile([-w.r_max, -w.s_max], H)
    hi = -lo
    obs = np.zeros((n_obs, 5))
    fallbacks = np.zeros((max(n_obs, 1), 2))
    fallbacks[:, 0] = 1.0
    for j, e in enumerate(obstacles):
        obs[j] = (e.center[0], e.center[1], e.heading,
                  e.semi_axes[0], e.semi_axes[1])
        d = np.array(e.center) - np.array(state.c)
        nd = np.hypot(d[0], d[1])
        if nd > _AXIS_EPS:
            fallbacks[j] = d / nd
    tight = np.asarray(tighten, dtype=float)
    if tight.ndim == 0:
        tight = np.full(H + 1, float(tight))
    elif tight.shape != (H + 1,):
        raise ValueError(
            f"tighten has shape {tight.shape}, expected scalar or ({H + 1},)")
    if not np.all(np.isfinite(tight)) or np.any(tight < 0.0):
        raise ValueError("tighten entries must be finite and >= 0")
    args = (_state_vec(state), _input_vec(u_prev),
            np.array(target.c_ref, dtype=float), target.theta_ref,
            w.packed(), model.alpha, model.beta, model.v_max, model.T,
            H, w.substeps, vehicle.semi_axes[0], vehicle.semi_axes[1],
            vehicle.exponent, obs, np.ascontiguousarray(tight))
    return OcpProblem("hc", 2 * H, m, lo, hi, args,
                      fallbacks=fallbacks if n_obs else None)


def transcribe_lc(state, plan, w, model, u_prev=None, age=0,
                  r_max=1.0, s_max=1.0):
    """Transcribe the tracking problem against an issued plan.

    `age` is the number of tracker periods elapsed since the plan was
    issued; carrot indices shift forward with it and saturate at the
    plan's final state.
    """
    if age < 0:
        raise ValueError(f"age must be >= 0, got {age}")
    states = plan.as_array()
    last = states.shape[0] - 1
    L = w.horizon
    if last < carrot_index(L, plan.substeps):
        raise ValueError(
            f"plan has {last + 1} states but stage {L} tracks index "
            f"{carrot_index(L, plan.substeps)}")
    idx = [min(last, carrot_index(k + age, plan.substeps))
           for k in range(L + 1)]
    ref_c = np.ascontiguousarray(states[idx, :2])
    ref_th = np.ascontiguousarray(states[idx, 2])
    lo = np.tile([-r_max, -s_max], L)
    args = (_state_vec(state), _input_vec(u_prev), ref_c, ref_th,
            w.packed(), model.alpha, model.beta, model.v_max, model.T,
            L, w.peak_stage)
    return OcpProblem("lc", 2 * L, 0, lo, -lo, args)
