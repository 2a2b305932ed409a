"""Command-line interface for simulations, checks, and benchmarks."""

import json
import statistics
import time
from pathlib import Path

import click
import numpy as np

from . import __version__
from ._kernels import BACKEND, hc_eval, reference_hc_eval
from .controller import closed_loop_run, hc_plan, lc_control
from .dynamics import ControlInput
from .geometry import find_separating_axis, intersects_oracle, margin_sweep
from .harness import (
    BATCH_DURATION_S,
    load_scenario,
    run_batch,
    shape_from_dict,
    write_outputs,
)
from .ocp import transcribe_hc, transcribe_lc
from .solver import check_gradient


@click.group()
@click.version_option(version=__version__)
def main():
    """Trajectory planning with superellipsoid separation certificates."""


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(exists=True), help="Scenario JSON file.")
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Output directory for the CSV log and JSON files.")
@click.option("--duration", default=BATCH_DURATION_S, show_default=True,
              type=float, help="Simulated duration cap in seconds.")
@click.option("--seed", default=None, type=int,
              help="Seed for the plant-mismatch perturbation.")
@click.option("--mismatch", default=0.0, show_default=True, type=float,
              help="Relative plant parameter perturbation magnitude.")
def simulate(scenario_path, out_dir, duration, seed, mismatch):
    """Run one scenario closed-loop and write its outputs."""
    scenario = load_scenario(scenario_path)
    log = closed_loop_run(scenario, duration, seed=seed, mismatch=mismatch)
    summary = write_outputs(log, out_dir)
    metrics = summary["metrics"]
    click.echo(f"scenario: {summary['scenario']}")
    click.echo(f"reached: {summary['reached']} "
               f"(time_to_target_s: {summary['time_to_target_s']})")
    click.echo(f"collisions: {metrics['collisions']} "
               f"min_margin: {metrics['min_margin']:.4f}")
    click.echo(f"hc_ms median: {metrics['hc_ms']['median']:.1f} "
               f"lc_ms median: {metrics['lc_ms']['median']:.2f}")
    click.echo(f"tracking p95 m: {metrics['tracking_error_m']['p95']:.4f}")


@main.command()
@click.option("--dir", "scenario_dir", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Directory of scenario JSON files.")
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Output directory.")
@click.option("--duration", default=BATCH_DURATION_S, show_default=True,
              type=float, help="Simulated duration cap per scenario.")
def batch(scenario_dir, out_dir, duration):
    """Run every scenario JSON in a directory."""
    paths = sorted(Path(scenario_dir).glob("*.json"))
    if not paths:
        raise click.ClickException(f"no scenario files in {scenario_dir}")
    scenarios = [load_scenario(p) for p in paths]
    summary = run_batch(scenarios, out_dir, duration=duration)
    click.echo(f"total: {summary['total']} reached: {summary['reached']} "
               f"failed: {summary['failed']}")
    for result in summary["results"]:
        if "error" in result:
            click.echo(f"  {result['scenario']}: ERROR {result['error']}")
        else:
            click.echo(f"  {result['scenario']}: reached={result['reached']} "
                       f"t={result['time_to_target_s']} "
                       f"min_margin={result['metrics']['min_margin']:.4f}")


@main.command()
@click.option("--vehicle", "vehicle_path", required=True,
              type=click.Path(exists=True), help="Superellipsoid JSON file.")
@click.option("--obstacle", "obstacle_path", required=True,
              type=click.Path(exists=True), help="Superellipsoid JSON file.")
def check(vehicle_path, obstacle_path):
    """Report the separation certificate and oracle verdict for two sets."""
    with open(vehicle_path) as fh:
        vehicle = shape_from_dict(json.load(fh))
    with open(obstacle_path) as fh:
        obstacle = shape_from_dict(json.load(fh))
    axis = find_separating_axis(vehicle, obstacle)
    margin = float(margin_sweep(vehicle, obstacle, 0.005).min())
    overlap = intersects_oracle(vehicle, obstacle)
    click.echo(f"best margin: {margin:.6f}")
    if axis is not None:
        click.echo(f"separating axis: [{axis.a[0]:.6f}, {axis.a[1]:.6f}]")
        click.echo("certificate: disjoint")
    else:
        click.echo("certificate: none found")
    click.echo(f"oracle: {'intersecting' if overlap else 'disjoint'}")


def _hold_plan(scenario):
    """Zero-input plan used to exercise the tracker transcription."""
    from .controller import Trajectory, _rollout_states

    states = _rollout_states(scenario.start,
                             np.zeros((scenario.hc.horizon, 2)),
                             scenario.model, scenario.timing.tau)
    return Trajectory(states=tuple(states), step_s=scenario.timing.t_h,
                      substeps=scenario.timing.tau, plan_id=0,
                      issued_tick=0, source="hold")


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(exists=True), help="Scenario JSON file.")
@click.option("--points", default=100, show_default=True, type=int,
              help="Random decision points per problem.")
def gradcheck(scenario_path, points):
    """Compare exact gradients against central finite differences."""
    scenario = load_scenario(scenario_path)
    hc = transcribe_hc(scenario.start, scenario.target, scenario.obstacles,
                       scenario.vehicle, scenario.hc, scenario.model)
    lc = transcribe_lc(scenario.start, _hold_plan(scenario), scenario.lc,
                       scenario.model, r_max=scenario.hc.r_max,
                       s_max=scenario.hc.s_max)
    hc_err = check_gradient(hc, points)
    lc_err = check_gradient(lc, points)
    click.echo(f"hc max relative error: {hc_err:.3e}")
    click.echo(f"lc max relative error: {lc_err:.3e}")
    if max(hc_err, lc_err) > 1e-5:
        raise click.ClickException("gradient check failed (> 1e-5)")
    click.echo("gradient check passed (<= 1e-5)")


def _timed(fn, repeats):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - t0) * 1e3)
    return samples


def _stats(samples):
    return (f"median {statistics.median(samples):.2f} ms, "
            f"max {max(samples):.2f} ms")


@main.command()
@click.option("--scenario", "scenario_path", required=True,
              type=click.Path(exists=True), help="Scenario JSON file.")
@click.option("--repeats", default=10, show_default=True, type=int,
              help="Solves per layer.")
def bench(scenario_path, repeats):
    """Time planner and tracker solves, and both kernel backends."""
    scenario = load_scenario(scenario_path)
    state = scenario.start

    hc_samples = []
    plan = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        plan, _ = hc_plan(state, scenario)
        hc_samples.append((time.perf_counter() - t0) * 1e3)
    click.echo(f"hc solve ({repeats} cold runs): {_stats(hc_samples)}")

    u_prev = ControlInput(r=0.0, s=0.0)
    lc_samples = _timed(
        lambda: lc_control(state, plan, u_prev, scenario), repeats)
    click.echo(f"lc solve ({repeats} cold runs): {_stats(lc_samples)}")

    problem = transcribe_hc(state, scenario.target, scenario.obstacles,
                            scenario.vehicle, scenario.hc, scenario.model)
    rng = np.random.default_rng(0)
    x = problem.project(rng.uniform(-1.0, 1.0, problem.n))
    y = rng.uniform(0.0, 1.0, problem.m)
    evals = max(200, repeats)
    active = _timed(lambda: hc_eval(x, *problem._args, y, 10.0, True), evals)
    fallback = _timed(
        lambda: reference_hc_eval(x, *problem._args, y, 10.0, True), evals)
    click.echo(f"kernel backend: {BACKEND}")
    click.echo(f"  active eval:      {_stats(active)}")
    click.echo(f"  pure-python eval: {_stats(fallback)}")
    click.echo(f"  speedup (median): "
               f"{statistics.median(fallback) / statistics.median(active):.1f}x")


if __name__ == "__main__":
    main()
