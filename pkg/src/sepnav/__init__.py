"""Trajectory planning with superellipsoid separation certificates.

A hierarchical nonlinear MPC stack for a planar unicycle: a slow planner
finds input sequences whose rolled-out poses are certifiably disjoint
from superellipsoid obstacles, and a fast tracker follows the accepted
plan. Both layers share one in-house projected-gradient solver with an
augmented-Lagrangian outer loop.
"""

from ._kernels import BACKEND
from .dynamics import ControlInput, ModelParams, VehicleState, euler_step, rollout
from .geometry import (
    SeparatingAxis,
    Superellipsoid,
    find_separating_axis,
    intersects_oracle,
    separation_margin,
    support,
)
from .ocp import (
    HcWeights,
    LcWeights,
    OcpProblem,
    ReferenceTarget,
    carrot_index,
    transcribe_hc,
    transcribe_lc,
)
from .solver import SolverConfig, SolverRun, alm_solve, check_gradient, inner_solve

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ControlInput",
    "HcWeights",
    "LcWeights",
    "ModelParams",
    "OcpProblem",
    "ReferenceTarget",
    "SeparatingAxis",
    "SolverConfig",
    "SolverRun",
    "Superellipsoid",
    "VehicleState",
    "alm_solve",
    "carrot_index",
    "check_gradient",
    "euler_step",
    "find_separating_axis",
    "inner_solve",
    "intersects_oracle",
    "rollout",
    "separation_margin",
    "support",
    "transcribe_hc",
    "transcribe_lc",
    "__version__",
]
