"""Hierarchical runner: slow planning, fast tracking, safety semantics.

The planner solves its problem twice per replanning instant with two
starts: the previous run shifted by one stage (multipliers included, so
optimization effectively continues across instants), then, with
whatever budget remains, a restart anchored to the active certified
plan (zero inputs when there is none). Converged runs sort first, then
lower cost; a candidate becomes the active plan only if every stage of
it carries a verified separation certificate and its near-term
clearance does not fall below the incumbent's, and otherwise the
tracker keeps following the last accepted plan. A tracker solve that
overruns its budget commands zero input so the vehicle stops rather
than acting on a stale solution.
"""

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import ControlInput, euler_step
from .geometry import SeparatingAxis, intersects_oracle, margin_sweep, separation_margin
from .ocp import transcribe_hc, transcribe_lc
from .solver import alm_solve, inner_solve

# An accepted plan must certify separation at least this strongly at
# every stage and obstacle (true margin, without transcription slack).
MARGIN_ACCEPT = 1e-6

# Per-stage transcription slack below the true separation boundary.
# Straight stages only need a buffer against tracking drift, and the
# tightest passages (which the plan crosses straight) cannot afford
# more. Stages where the plan turns need enough to absorb the tracker's
# systematic inside cut: the tracker's references jump ahead of real
# time by up to one planning stage, shortening the arc is its only way
# to close that lead, and the resulting offset is near its ceiling for
# any sustained bend (gentler bends trade less radial error per meter
# of arc but hold it over more arc), so the slack steps up to the bend
# level once the turn rate is clearly above straight-line wobble.
TIGHTEN_BASE = 8e-2
TIGHTEN_BEND = 4e-1
TIGHTEN_REVERSAL = 4.5e-1
TURN_STRAIGHT = 0.04
TURN_BEND = 0.10

# A stage is near a curvature reversal if clear turns of both signs
# occur within this many stages of it; a short straight between
# opposite lobes is still well inside the tracker's shortcut chord.
# The turn thresholds sit above the small alternating corrections a
# plan makes inside a straight passage: those never develop a real
# chord cut, and boosting them would demand slack a narrow passage
# cannot afford.
TURN_REVERSAL = 8e-2
REVERSAL_SPAN = 4

# The tracker's shortcut chord shrinks with speed: per tracking step
# the carrot advances by roughly the plan's local speed, so a slow
# bend is followed nearly point to point while a fast one is cut. The
# extra slack scales accordingly, reaching full size at this speed.
# This also lets the planner trade speed against standoff through
# turns too confined for the full reserve, instead of stalling there.
BOOST_SPEED = 0.7

# The first stages are pinned by the current state: no input choice
# moves them sideways by more than a small fraction of a meter, so
# demanding extra slack there only loads the penalty terms with
# violations no plan can remove, and the solver answers that pressure
# by stalling or backing away instead of transiting. The extra slack
# therefore phases in over the first stages, and every stage's demand
# is additionally capped at what the incumbent plan achieves there
# plus the sideways displacement reachable by that stage (headroom
# growing with the stage index). Where clearance is already wide the
# cap is inactive; where the vehicle is pressed into a passage it
# waives exactly the unreachable part. Far stages outgrow the cap
# entirely, so bends are shaped wide while they are still far away
# and stay wide as they age into the near window.
RELAX_NEAR = 1
RELAX_FAR = 3
NEAR_HEADROOM = 5e-2
HEADROOM_RATE = 1e-1

# A candidate plan is accepted only if its certified clearance at each
# of the next few stages is no worse than the incumbent's at the same
# instant (or reaches the intended standoff for that stage, through
# passages too tight for that). Replanning re-anchors each problem at
# the tracker's actual position, which sits slightly inside the
# previous plan through bends; without this ratchet every replan would
# re-hug the boundary from the drifted position and the clearance
# would walk to zero. The comparison is per stage because clearance is
# structurally uneven along a route: a tight straight passage is safe
# at small clearance while a bend is not, and a single scalar floor
# taken across the window would let a candidate trade away bend
# clearance against passage stages. The tolerance keeps solver jitter
# from rejecting equal-quality plans.
ACCEPT_WINDOW = 6
FLOOR_TOL = 2e-2

# Fraction of a layer's sampling time granted to its solver by default.
BUDGET_FRACTION = 0.9

# Fraction of the planning budget granted to the warm-started run; the
# cold start gets whatever the warm run leaves unused, and is skipped
# outright when the warm run's plan already certifies.
WARM_BUDGET_FRACTION = 0.6

# Fraction of the tracking budget given to the solver as its deadline;
# the slack absorbs the final partial iteration so that finishing at
# the deadline is not mistaken for a budget overrun.
DEADLINE_FRACTION = 0.85

# Per-outer cap on inner iterations while planning. Multiplier and
# penalty updates need to interleave with descent inside one planning
# budget; a single uncapped inner solve would starve them.
HC_INNER_CAP = 400

# Ceiling on the penalty carried between planning instants; beyond it
# the penalty curvature swamps the inner solver for no feasibility gain.
RHO_WARM_MAX = 1e5


@dataclass(frozen=True)
class ControllerTiming:
    """Sampling times of the two layers and the tracker's peak stage."""

    T: float
    tau: int
    omega: int = None

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError(f"T must be positive, got {self.T}")
        if self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")
        if self.omega is None:
            object.__setattr__(self, "omega", 2 * self.tau)
        if self.omega < 0 or self.omega % self.tau != 0:
            raise ValueError(
                f"omega must be a nonnegative multiple of tau, got {self.omega}")

    @property
    def t_l(self):
        return self.T

    @property
    def t_h(self):
        return self.tau * self.T

    @property
    def hc_budget_ms(self):
        return BUDGET_FRACTION * self.t_h * 1e3

    @property
    def lc_budget_ms(self):
        return BUDGET_FRACTION * self.t_l * 1e3


@dataclass(frozen=True)
class Trajectory:
    """Planned states at the planner's sampling instants."""

    states: tuple
    step_s: float
    substeps: int
    plan_id: int
    issued_tick: int
    source: str
    run: object = None

    def __post_init__(self):
        states = tuple(self.states)
        if len(states) < 2:
            raise ValueError(f"plan needs >= 2 states, got {len(states)}")
        object.__setattr__(self, "states", states)
        arr = np.array([[z.c[0], z.c[1], z.theta, z.v] for z in states])
        if not np.isfinite(arr).all():
            raise ValueError("plan states must be finite")
        object.__setattr__(self, "_array", arr)

    def as_array(self):
        """States as an (H+1, 4) array of [c1, c2, theta, v] rows."""
        return self._array

    def __len__(self):
        return len(self.states)


@dataclass
class HcDiagnostics:
    """What happened during one planning instant.

    warm_run is the run (in the full decision-vector layout) that the
    next instant should continue from; it is set even when no plan was
    accepted, so optimization progress is never discarded.
    """

    run_a: object
    run_b: object
    chosen: str
    accepted: bool
    emergency: bool
    wall_ms: float
    warm_run: object = None


@dataclass
class LcDiagnostics:
    """What happened during one tracking step."""

    result: object
    solution: np.ndarray
    timed_out: bool
    wall_ms: float


def _rollout_states(state, inputs, model, substeps):
    """Stage-boundary states reached by applying each input substeps times."""
    states = [state]
    z = state
    for r, s in inputs:
        u = ControlInput(r=float(r), s=float(s))
        for _ in range(substeps):
            z = euler_step(z, u, model)
        states.append(z)
    return states


def _shifted_warm_start(run, horizon, n_obs, stages=1):
    """Previous solution advanced by whole stages; final stage duplicated.

    Multiplier rows cover the controllable stages 1..H, one block per
    obstacle, and shift the same way as the inputs.
    """
    k = min(max(stages, 0), horizon - 1)
    ni = 2 * horizon
    u = run.x[:ni].reshape(horizon, 2)
    u_shift = np.vstack([u[k:], np.repeat(u[-1:], k, axis=0)])
    parts = [u_shift.ravel()]
    for j in range(n_obs):
        axes = run.x[ni + j * 2 * (horizon + 1):
                     ni + (j + 1) * 2 * (horizon + 1)].reshape(horizon + 1, 2)
        parts.append(
            np.vstack([axes[k:], np.repeat(axes[-1:], k, axis=0)]).ravel())
    y = run.y.reshape(n_obs, horizon)
    y_shift = np.hstack([y[:, k:], np.repeat(y[:, -1:], k, axis=1)]).ravel()
    return np.concatenate(parts), y_shift


def _tighten_profile(plan, age, horizon):
    """Per-stage margin slack sized from the incumbent plan's turning.

    Stage t of the new problem lines up with incumbent stage t + age.
    Each stage boundary takes the largest turn among the segment behind
    it and the two ahead: the new solution's bend can land a stage away
    from the incumbent's, and the tracker starts cutting on the bend's
    approach. Stages near a curvature reversal get the highest level:
    there the tracker's shortcut runs from inside one lobe to inside
    the other, far deeper than its steady-bend cut. With no incumbent
    the profile is uniform at the base value.

    The returned profile is the intended standoff per stage. Constraint
    rows use it through _reach_relax, which waives the extra standoff
    on stages too near to reshape; the acceptance floor uses it as is.
    """
    if plan is None:
        return np.full(horizon + 1, TIGHTEN_BASE)
    arr = plan.as_array()
    theta = arr[:, 2]
    d = np.diff(theta)
    d = (d + math.pi) % (2.0 * math.pi) - math.pi
    seg = np.abs(d)
    last = len(seg) - 1
    t = np.arange(horizon + 1) + age
    turn = seg[np.clip(t - 1, 0, last)]
    for k in range(2):
        turn = np.maximum(turn, seg[np.clip(t + k, 0, last)])
    ramp = np.clip((turn - TURN_STRAIGHT) / (TURN_BEND - TURN_STRAIGHT),
                   0.0, 1.0)
    profile = TIGHTEN_BASE + (TIGHTEN_BEND - TIGHTEN_BASE) * ramp
    left = np.zeros(horizon + 1, dtype=bool)
    right = np.zeros(horizon + 1, dtype=bool)
    for k in range(-REVERSAL_SPAN, REVERSAL_SPAN + 1):
        s_k = d[np.clip(t + k, 0, last)]
        left |= s_k > TURN_REVERSAL
        right |= s_k < -TURN_REVERSAL
    boost = np.where(left & right, np.maximum(profile, TIGHTEN_REVERSAL),
                     profile)
    speed = np.abs(arr[:, 3])
    scale = np.clip(speed[np.clip(t, 0, len(speed) - 1)] / BOOST_SPEED,
                    0.0, 1.0)
    return TIGHTEN_BASE + (boost - TIGHTEN_BASE) * scale


def _reach_relax(profile):
    """Phase the extra standoff in over the stages a plan can reshape."""
    reach = np.clip((np.arange(len(profile)) - RELAX_NEAR)
                    / float(RELAX_FAR - RELAX_NEAR), 0.0, 1.0)
    return TIGHTEN_BASE + (profile - TIGHTEN_BASE) * reach


def _certified(plan, x, scenario):
    """Certificate check over all stages plus the near-window clearance.

    The planner transcribes with the safety-enlarged vehicle, so its
    solutions aim for a clearance reserve; certification only demands
    that the actual vehicle is separated at every stage. The distinction
    matters when the start state has drifted into the reserve: the best
    reachable early stages then violate the enlarged margin, but a plan
    that dives back to clearance is still safe and rejecting it would
    leave the loop tracking a staler, worse plan. Stage 0 is the
    already-realized present state, not a decision, so certification
    covers the controllable stages 1..H. Returns (ok, gaps) where
    gaps[t - 1] is the certified clearance at stage t for stages
    1..ACCEPT_WINDOW.
    """
    H = scenario.hc.horizon
    template = scenario.vehicle
    states = plan.as_array()
    ok = True
    gaps = np.full(ACCEPT_WINDOW, math.inf)
    for j, obstacle in enumerate(scenario.obstacles):
        base = 2 * H + j * 2 * (H + 1)
        for t in range(1, H + 1):
            vehicle = template.at_pose(
                (states[t, 0], states[t, 1]), states[t, 2])
            axis = SeparatingAxis(a=(x[base + 2 * t], x[base + 2 * t + 1]))
            value = separation_margin(vehicle, obstacle, axis)
            if value > MARGIN_ACCEPT:
                ok = False
            if t <= ACCEPT_WINDOW:
                gaps[t - 1] = min(gaps[t - 1], -value)
    return ok, gaps


def _incumbent_stage_gaps(plan, age, scenario, horizon):
    """Certified clearance of the active plan per upcoming stage.

    Entry t is the clearance at incumbent stage t + age (clamped to the
    plan's end), so it lines up with stage t of the next problem. Plans
    without a stored run (the zero-input hold) have no certificate, so
    every entry is -inf and any certified candidate may replace them.
    """
    if plan is None or plan.run is None:
        return np.full(horizon + 1, -math.inf)
    H = len(plan) - 1
    states = plan.as_array()
    x = plan.run.x
    template = scenario.vehicle
    stage_gap = np.full(H + 1, math.inf)
    lo = min(age, H)
    hi = min(age + horizon, H)
    for j, obstacle in enumerate(scenario.obstacles):
        base = 2 * H + j * 2 * (H + 1)
        for t in range(lo, hi + 1):
            vehicle = template.at_pose(
                (states[t, 0], states[t, 1]), states[t, 2])
            axis = SeparatingAxis(a=(x[base + 2 * t], x[base + 2 * t + 1]))
            stage_gap[t] = min(stage_gap[t],
                               -separation_margin(vehicle, obstacle, axis))
    idx = np.clip(np.arange(horizon + 1) + age, 0, H)
    return stage_gap[idx]


def _incumbent_gap(plan, age, scenario):
    """Least clearance of the active plan over the acceptance window.

    The window starts at the stage the tracker is about to pin and spans
    ACCEPT_WINDOW stages, clamped to the plan's end.
    """
    if plan is None or plan.run is None:
        return -math.inf
    gaps = _incumbent_stage_gaps(plan, age, scenario, ACCEPT_WINDOW)
    return float(gaps[1:].min())


def hc_plan(state, scenario, prev=None, last_plan=None, budget_ms=None,
            plan_id=0, issued_tick=0, u_prev=None):
    """Plan from the current state; returns (Trajectory or None, diagnostics).

    None means the previous plan stays active. With no previous plan to
    fall back on, a zero-input hold trajectory is returned instead.
    """
    start = time.perf_counter()
    if budget_ms is None:
        budget_ms = scenario.timing.hc_budget_ms
    H = scenario.hc.horizon
    age = 0
    if last_plan is not None:
        age = max(0, round((issued_tick - last_plan.issued_tick)
                           / scenario.timing.tau))
    intent = _tighten_profile(last_plan, age, H)
    rows = _reach_relax(intent)
    achieved = _incumbent_stage_gaps(last_plan, age, scenario, RELAX_FAR - 1)
    near = np.maximum(TIGHTEN_BASE,
                      achieved - scenario.safety_margin + NEAR_HEADROOM)
    rows[:RELAX_FAR] = np.minimum(rows[:RELAX_FAR], near)
    problem = transcribe_hc(state, scenario.target, scenario.obstacles,
                            scenario.vehicle.enlarged(scenario.safety_margin),
                            scenario.hc, scenario.model, u_prev=u_prev,
                            tighten=rows)
    reduced = problem.reduced()
    n_obs = len(scenario.obstacles)
    cap = min(scenario.solver.max_inner, HC_INNER_CAP)
    # a candidate may ride the boundary no closer than the intended
    # standoff for the stages just ahead, and no closer than the
    # incumbent does there (entering a passage too tight for the
    # intended standoff shrinks every clearance, so the incumbent's
    # own gap caps the demand)
    gap_floor = min(_incumbent_gap(last_plan, age, scenario),
                    scenario.safety_margin
                    + float(intent[1:ACCEPT_WINDOW + 1].min()) - FLOOR_TOL)

    def attempt(run, name):
        run = replace(run, x=reduced.assemble(run.x))
        inputs = run.x[:2 * H].reshape(H, 2)
        states = _rollout_states(state, inputs, scenario.model,
                                 scenario.hc.substeps)
        plan = Trajectory(states=tuple(states), step_s=scenario.timing.t_h,
                          substeps=scenario.timing.tau, plan_id=plan_id,
                          issued_tick=issued_tick, source=name, run=run)
        ok, gap = _certified(plan, run.x, scenario)
        return plan, ok and gap >= gap_floor

    run_b = None
    if prev is not None:
        if last_plan is not None and last_plan.source != "emergency":
            # the vehicle advanced one stage along the active plan
            x0_b, y0_b = _shifted_warm_start(prev, H, n_obs)
        else:
            # holding still: the previous solution already lines up
            x0_b, y0_b = prev.x, prev.y
        # resume the penalty schedule where the previous instant left it;
        # while the chain stays feasible the multipliers carry the
        # constraints, so the penalty can relax and keep the inner
        # problem well conditioned for the next squeeze
        rho_b = max(getattr(prev, "rho", 0.0), scenario.solver.rho0)
        if getattr(prev, "violation", 1.0) <= scenario.solver.delta:
            rho_b = max(scenario.solver.rho0, rho_b / scenario.solver.gamma)
        rho_b = min(rho_b, RHO_WARM_MAX)
        run_b = alm_solve(
            reduced, x0_b[:reduced.n], y0_b,
            replace(scenario.solver, max_inner=cap, rho0=rho_b,
                    budget_ms=WARM_BUDGET_FRACTION * budget_ms))
        plan_b, ok = attempt(run_b, "b")
        if ok:
            # the continuation already certifies; spending the rest of
            # the budget on a cold start would not change the choice
            wall_ms = (time.perf_counter() - start) * 1e3
            return plan_b, HcDiagnostics(run_a=None, run_b=run_b, chosen="b",
                                         accepted=True, emergency=False,
                                         wall_ms=wall_ms, warm_run=plan_b.run)
    remaining = budget_ms - (time.perf_counter() - start) * 1e3
    if last_plan is not None and last_plan.run is not None:
        # restart anchored to the still-active certified plan, advanced
        # to the present; unlike the evolving continuation chain, this
        # start cannot have wandered away from a feasible trajectory
        x0_a, y0_a = _shifted_warm_start(last_plan.run, H, n_obs, age)
        x0_a = x0_a[:reduced.n]
    else:
        x0_a, y0_a = np.zeros(reduced.n), None
    run_a = alm_solve(reduced, x0_a, y0_a,
                      replace(scenario.solver, max_inner=cap,
                              budget_ms=max(remaining, 1.0)))

    candidates = [(run_a, "a")]
    if run_b is not None:
        candidates.append((run_b, "b"))
    candidates.sort(key=lambda rc: (not rc[0].converged, rc[0].cost,
                                    0 if rc[1] == "b" else 1))
    attempts = [attempt(run, name) for run, name in candidates]
    # continue next instant from the accepted run, or failing that the
    # run that made the most feasibility progress
    warm_run = min((plan.run for plan, _ in attempts),
                   key=lambda run: (run.violation, run.cost))

    for plan, ok in attempts:
        if ok:
            wall_ms = (time.perf_counter() - start) * 1e3
            return plan, HcDiagnostics(run_a=run_a, run_b=run_b,
                                       chosen=plan.source, accepted=True,
                                       emergency=False, wall_ms=wall_ms,
                                       warm_run=plan.run)

    wall_ms = (time.perf_counter() - start) * 1e3
    if last_plan is not None:
        return None, HcDiagnostics(run_a=run_a, run_b=run_b, chosen=None,
                                   accepted=False, emergency=False,
                                   wall_ms=wall_ms, warm_run=warm_run)
    hold = _rollout_states(state, np.zeros((H, 2)), scenario.model,
                           scenario.hc.substeps)
    plan = Trajectory(states=tuple(hold), step_s=scenario.timing.t_h,
                      substeps=scenario.timing.tau, plan_id=plan_id,
                      issued_tick=issued_tick, source="emergency")
    return plan, HcDiagnostics(run_a=run_a, run_b=run_b, chosen=None,
                               accepted=False, emergency=True,
                               wall_ms=wall_ms, warm_run=warm_run)


def lc_control(state, plan, u_prev, scenario, age=0, warm=None,
               budget_ms=None):
    """Track the plan for one step; returns (ControlInput, diagnostics).

    The solver is given a deadline inside the budget and returns its
    best iterate by then, which is the commanded input. Being granted
    no budget, or overrunning it outright (a stalled evaluation),
    commands (0, 0).
    """
    if budget_ms is None:
        budget_ms = scenario.timing.lc_budget_ms
    if budget_ms <= 0:
        return ControlInput(r=0.0, s=0.0), LcDiagnostics(
            result=None, solution=None, timed_out=True, wall_ms=0.0)
    problem = transcribe_lc(state, plan, scenario.lc, scenario.model,
                            u_prev=u_prev, age=age,
                            r_max=scenario.hc.r_max, s_max=scenario.hc.s_max)
    if warm is not None and warm.shape == (problem.n,):
        x0 = np.concatenate([warm[2:], warm[-2:]])
    else:
        x0 = np.zeros(problem.n)
    cfg = replace(scenario.solver, budget_ms=DEADLINE_FRACTION * budget_ms)
    result = inner_solve(problem, x0, cfg)
    if result.wall_ms > budget_ms:
        return ControlInput(r=0.0, s=0.0), LcDiagnostics(
            result=result, solution=result.x, timed_out=True,
            wall_ms=result.wall_ms)
    u = ControlInput(r=float(result.x[0]), s=float(result.x[1]))
    return u, LcDiagnostics(result=result, solution=result.x,
                            timed_out=False, wall_ms=result.wall_ms)


def closed_loop_run(scenario, duration, seed=None, mismatch=0.0):
    """Simulate the full hierarchy; returns a SimLog.

    The simulation clock is virtual: solver wall times are recorded but
    never consume simulated time. The run stops early once the vehicle
    is within a meter of the target. `mismatch` perturbs the simulated
    plant's parameters relative to the model both layers plan with.
    """
    from .harness import ReplanRecord, SimLog, TickRecord

    timing = scenario.timing
    plant = scenario.model
    rng_seed = None
    if mismatch:
        rng_seed = 0 if seed is None else int(seed)
        rng = np.random.default_rng(rng_seed)
        plant = replace(
            plant,
            alpha=plant.alpha * (1.0 + mismatch * rng.uniform(-1, 1)),
            beta=plant.beta * (1.0 + mismatch * rng.uniform(-1, 1)),
            v_max=plant.v_max * (1.0 + mismatch * rng.uniform(-1, 1)))

    state = scenario.start
    plan = None
    last_run = None
    prev_lc = None
    u_prev = ControlInput(r=0.0, s=0.0)
    ticks = []
    replans = []
    plans = []
    next_plan_id = 0
    reached = False
    time_to_target = None
    n_ticks = max(0, math.ceil(duration / timing.T))

    for k in range(n_ticks):
        t_now = k * timing.T
        hc_ms = None
        if k % timing.tau == 0:
            new_plan, diag = hc_plan(state, scenario, prev=last_run,
                                     last_plan=plan, plan_id=next_plan_id,
                                     issued_tick=k, u_prev=u_prev)
            hc_ms = diag.wall_ms
            chosen_run = None
            if new_plan is not None:
                plan = new_plan
                plans.append(new_plan)
                next_plan_id += 1
                if diag.accepted:
                    chosen_run = new_plan.run
            if diag.warm_run is not None:
                last_run = diag.warm_run
            replans.append(ReplanRecord(
                tick=k, time_s=t_now, wall_ms=diag.wall_ms,
                accepted=diag.accepted, emergency=diag.emergency,
                chosen=diag.chosen,
                cost=chosen_run.cost if chosen_run else math.nan,
                infeasibility=(chosen_run.infeasibility
                               if chosen_run else math.nan)))
        u, ldiag = lc_control(state, plan, u_prev, scenario,
                              age=k - plan.issued_tick, warm=prev_lc)
        prev_lc = ldiag.solution
        vehicle = scenario.vehicle.at_pose(state.c, state.theta)
        margins = []
        collided = False
        for obstacle in scenario.obstacles:
            margins.append(
                -float(margin_sweep(vehicle, obstacle, 0.01)[1].min()))
            if intersects_oracle(vehicle, obstacle):
                collided = True
        ticks.append(TickRecord(
            time_s=t_now, state=state, u=u, plan_id=plan.plan_id,
            lc_ms=ldiag.wall_ms, hc_ms=hc_ms, margins=tuple(margins),
            collided=collided, timed_out=ldiag.timed_out))
        state = euler_step(state, u, plant)
        u_prev = u
        dist = math.hypot(state.c[0] - scenario.target.c_ref[0],
                          state.c[1] - scenario.target.c_ref[1])
        if dist <= 1.0:
            reached = True
            time_to_target = (k + 1) * timing.T
            break

    return SimLog(scenario_name=scenario.name, ticks=ticks, replans=replans,
                  plans=plans, final_state=state, reached=reached,
                  time_to_target=time_to_target, duration_s=duration,
                  seed=rng_seed, mismatch=mismatch)
