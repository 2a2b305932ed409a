"""Scenario I/O, simulation logging, batch running, and metrics.

Scenarios are JSON (documented in the README; positions are (North,
East) meters, angles radians). Per-tick logs are CSV with a fixed column
order; plans and summaries are JSON so other tooling can consume them.
"""

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .controller import ControllerTiming, closed_loop_run
from .dynamics import ControlInput, ModelParams, VehicleState
from .geometry import Superellipsoid
from .ocp import HcWeights, LcWeights, ReferenceTarget
from .solver import SolverConfig

BATCH_DURATION_S = 120.0


@dataclass(frozen=True)
class Scenario:
    """Everything one closed-loop run needs, validated on construction."""

    name: str
    vehicle: Superellipsoid
    start: VehicleState
    target: ReferenceTarget
    obstacles: tuple
    model: ModelParams
    hc: HcWeights
    lc: LcWeights
    timing: ControllerTiming
    solver: SolverConfig
    # planner-side uniform enlargement of the vehicle, in meters; keeps
    # certified plans clear of obstacles by at least this much so that
    # bounded tracking error cannot produce a real collision
    safety_margin: float = 0.0

    def __post_init__(self):
        if not self.name:
            raise ValueError("name must be a nonempty string")
        if not 0.0 <= float(self.safety_margin) < min(self.vehicle.semi_axes):
            raise ValueError(
                f"safety_margin must be in [0, min semi-axis), got "
                f"{self.safety_margin}")
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        for j, e in enumerate(self.obstacles):
            if e.exponent != self.vehicle.exponent:
                raise ValueError(
                    f"obstacles[{j}].exponent {e.exponent} differs from "
                    f"vehicle.exponent {self.vehicle.exponent}")
        if self.lc.horizon >= self.hc.horizon * self.timing.tau:
            raise ValueError(
                f"lc.horizon {self.lc.horizon} must be shorter than the "
                f"plan: hc.horizon * tau = {self.hc.horizon * self.timing.tau}")
        if self.lc.peak_stage != self.timing.omega:
            raise ValueError(
                f"lc.peak_stage {self.lc.peak_stage} must equal "
                f"timing.omega {self.timing.omega}")


@dataclass
class TickRecord:
    """One tracker period of the simulation."""

    time_s: float
    state: VehicleState
    u: ControlInput
    plan_id: int
    lc_ms: float
    hc_ms: float
    margins: tuple
    collided: bool
    timed_out: bool


@dataclass
class ReplanRecord:
    """One planning instant."""

    tick: int
    time_s: float
    wall_ms: float
    accepted: bool
    emergency: bool
    chosen: str
    cost: float
    infeasibility: float


@dataclass
class SimLog:
    """Complete record of one closed-loop run."""

    scenario_name: str
    ticks: list
    replans: list
    plans: list
    final_state: VehicleState
    reached: bool
    time_to_target: float
    duration_s: float
    seed: int
    mismatch: float


def _field(data, key, path):
    if key not in data:
        raise ValueError(f"scenario is missing field '{path}{key}'")
    return data[key]


def shape_from_dict(data, path=""):
    center = tuple(_field(data, "center", path)) if "center" in data else (0.0, 0.0)
    heading = float(data.get("heading", 0.0))
    return Superellipsoid(center=center, heading=heading,
                          semi_axes=tuple(_field(data, "semi_axes", path)),
                          exponent=float(_field(data, "exponent", path)))


def shape_to_dict(shape):
    return {"center": list(shape.center), "heading": shape.heading,
            "semi_axes": list(shape.semi_axes), "exponent": shape.exponent}


def scenario_from_dict(data):
    """Build and validate a Scenario from plain JSON data."""
    try:
        start = _field(data, "start", "")
        target = _field(data, "target", "")
        scenario = Scenario(
            name=str(_field(data, "name", "")),
            vehicle=shape_from_dict(_field(data, "vehicle", ""), "vehicle."),
            start=VehicleState(c=tuple(_field(start, "c", "start.")),
                               theta=float(start.get("theta", 0.0)),
                               v=float(start.get("v", 0.0))),
            target=ReferenceTarget(
                c_ref=tuple(_field(target, "c_ref", "target.")),
                theta_ref=float(target.get("theta_ref", 0.0))),
            obstacles=tuple(
                shape_from_dict(o, f"obstacles[{j}].")
                for j, o in enumerate(data.get("obstacles", []))),
            model=ModelParams(**_field(data, "model", "")),
            hc=HcWeights(**_field(data, "hc", "")),
            lc=LcWeights(**_field(data, "lc", "")),
            timing=ControllerTiming(**_field(data, "timing", "")),
            solver=SolverConfig(**data.get("solver", {})),
            safety_margin=float(data.get("safety_margin", 0.0)))
    except TypeError as exc:
        raise ValueError(f"scenario field error: {exc}") from exc
    return scenario


def scenario_to_dict(scenario):
    """Plain-JSON form of a Scenario; inverse of scenario_from_dict."""
    return {
        "name": scenario.name,
        "vehicle": {"semi_axes": list(scenario.vehicle.semi_axes),
                    "exponent": scenario.vehicle.exponent},
        "start": {"c": list(scenario.start.c), "theta": scenario.start.theta,
                  "v": scenario.start.v},
        "target": {"c_ref": list(scenario.target.c_ref),
                   "theta_ref": scenario.target.theta_ref},
        "obstacles": [shape_to_dict(e) for e in scenario.obstacles],
        "model": asdict(scenario.model),
        "hc": asdict(scenario.hc),
        "lc": asdict(scenario.lc),
        "timing": {"T": scenario.timing.T, "tau": scenario.timing.tau,
                   "omega": scenario.timing.omega},
        "solver": {k: v for k, v in asdict(scenario.solver).items()
                   if not (k == "budget_ms" and math.isinf(v))},
        "safety_margin": scenario.safety_margin,
    }


def load_scenario(path):
    """Load and validate a scenario JSON file."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    try:
        return scenario_from_dict(data)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def save_scenario(scenario, path):
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write("\n")


def write_log_csv(log, path):
    """Fixed-column per-tick CSV; hc_ms is blank on non-replan ticks."""
    n_obs = len(log.ticks[0].margins) if log.ticks else 0
    header = ["time_s", "c1_m", "c2_m", "theta_rad", "v_mps", "r", "s",
              "plan_id", "lc_ms", "hc_ms"]
    header += [f"margin_obs_{j}" for j in range(n_obs)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in log.ticks:
            writer.writerow(
                [repr(row.time_s), repr(row.state.c[0]), repr(row.state.c[1]),
                 repr(row.state.theta), repr(row.state.v), repr(row.u.r),
                 repr(row.u.s), row.plan_id, repr(row.lc_ms),
                 "" if row.hc_ms is None else repr(row.hc_ms)]
                + [repr(m) for m in row.margins])


def write_plans_json(log, path):
    """All plans issued during a run, newest last."""
    plans = []
    for plan in log.plans:
        plans.append({
            "plan_id": plan.plan_id,
            "issued_tick": plan.issued_tick,
            "step_s": plan.step_s,
            "substeps": plan.substeps,
            "source": plan.source,
            "states": plan.as_array().tolist(),
        })
    with open(path, "w") as fh:
        json.dump(plans, fh)
        fh.write("\n")


def _percentiles(values):
    if len(values) == 0:
        return {"median": None, "p95": None, "max": None}
    arr = np.asarray(values, dtype=float)
    return {"median": float(np.percentile(arr, 50)),
            "p95": float(np.percentile(arr, 95)),
            "max": float(arr.max())}


def _plan_reference(plan, elapsed_ticks):
    """Plan position at a tick offset, linearly interpolated between stages."""
    states = plan.as_array()
    frac = elapsed_ticks / plan.substeps
    i0 = min(int(math.floor(frac)), states.shape[0] - 1)
    i1 = min(i0 + 1, states.shape[0] - 1)
    w = min(frac - i0, 1.0)
    return (1.0 - w) * states[i0, :2] + w * states[i1, :2]


def compute_metrics(log, plan_history=None):
    """Tracking-error series and percentile statistics for one run.

    The tracking error at a tick is the distance from the vehicle to the
    active plan's time-interpolated position at that tick's plan age.
    """
    if not log.ticks:
        raise ValueError("log has no ticks")
    plans = {p.plan_id: p for p in (plan_history or log.plans)}
    errors = []
    for k, row in enumerate(log.ticks):
        plan = plans[row.plan_id]
        ref = _plan_reference(plan, k - plan.issued_tick)
        errors.append(math.hypot(row.state.c[0] - ref[0],
                                 row.state.c[1] - ref[1]))
    margins = [m for row in log.ticks for m in row.margins]
    return {
        "tracking_error_m": {**_percentiles(errors), "series": errors},
        "hc_ms": _percentiles([r.wall_ms for r in log.replans]),
        "lc_ms": _percentiles([row.lc_ms for row in log.ticks]),
        "min_margin": min(margins) if margins else None,
        "collisions": sum(1 for row in log.ticks if row.collided),
        "lc_timeouts": sum(1 for row in log.ticks if row.timed_out),
        "replans": len(log.replans),
        "accepted_replans": sum(1 for r in log.replans if r.accepted),
    }


def summarize(log):
    """Run summary dict (also written as <name>_summary.json)."""
    metrics = compute_metrics(log)
    series = metrics["tracking_error_m"].pop("series")
    return {
        "scenario": log.scenario_name,
        "reached": log.reached,
        "time_to_target_s": log.time_to_target,
        "duration_s": log.duration_s,
        "ticks": len(log.ticks),
        "seed": log.seed,
        "mismatch": log.mismatch,
        "final_state": {"c": list(log.final_state.c),
                        "theta": log.final_state.theta,
                        "v": log.final_state.v},
        "metrics": metrics,
        "tracking_error_series_m": series,
    }


def write_outputs(log, out_dir, stem=None):
    """Write the CSV log, plans JSON, and summary JSON for one run."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = stem or log.scenario_name
    write_log_csv(log, out / f"{stem}.csv")
    write_plans_json(log, out / f"{stem}_plans.json")
    summary = summarize(log)
    with open(out / f"{stem}_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return summary


def run_batch(scenarios, out_dir, duration=BATCH_DURATION_S, seed=None):
    """Run every scenario, write its outputs, and write a batch summary.

    A failing scenario is recorded in the summary and the batch continues.
    Duplicate scenario names get numeric suffixes.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = []
    seen = {}
    for scenario in scenarios:
        count = seen.get(scenario.name, 0) + 1
        seen[scenario.name] = count
        stem = scenario.name if count == 1 else f"{scenario.name}_{count}"
        try:
            log = closed_loop_run(scenario, duration, seed=seed)
            summary = write_outputs(log, out, stem=stem)
            summary.pop("tracking_error_series_m", None)
            results.append(summary)
        except Exception as exc:  # noqa: BLE001 - batch must continue
            results.append({"scenario": stem, "error": str(exc)})
    summary = {
        "total": len(results),
        "reached": sum(1 for r in results if r.get("reached")),
        "failed": sum(1 for r in results if "error" in r),
        "results": results,
    }
    with open(out / "batch_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return summary
