"""Projection-network dynamics and time-stepping solvers.

The solver integrates the ordinary differential equation

    dx/dt = F(x) = P(w - x) - w,      w = A^T A x - A^T b,

where P clips componentwise to the box [-lam, lam]^l. Equilibria of F are
exactly the minimizers of the l1 problem, and ||F(x)||_inf doubles as the
optimality residual, so each Euler step costs a single Gram product.

By the Moreau decomposition of the box projection, F(x) can be rewritten as
soft_threshold(lam, x - w) - x, hence forward Euler with unit step is the
classical proximal-gradient update. The default step 1/(1 + U), with U an
upper bound on ||A^T A||_2, makes a natural energy function decrease at
every step by a provable margin.
"""

import time as _time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DimensionMismatchError, NonFiniteInputError
from .problem import GramCache, ProblemInstance, primal_objective
from .projection import box_project

__all__ = [
    "SolveStatus",
    "SolverConfig",
    "Trajectory",
    "SolveResult",
    "rhs",
    "step_euler",
    "fixed_point_residual",
    "default_step_size",
    "solve",
]

DIVERGENCE_THRESHOLD = 1e12


class SolveStatus(str, Enum):
    CONVERGED = "converged"
    MAX_STEPS_REACHED = "max_steps_reached"
    DIVERGED = "diverged"


@dataclass
class SolverConfig:
    """Integration settings.

    integrator is one of "euler", "rk4", "adaptive". step_size None picks
    1/(1 + gram_norm_ub). The adaptive integrator is Euler with step
    doubling: it compares one full step against two half steps and keeps
    the local error below abs_tol + rel_tol * ||x||_inf, shrinking or
    growing the step inside [min_step, max_step].
    """

    integrator: str = "euler"
    step_size: float | None = None
    tol: float = 1e-8
    max_steps: int = 500_000
    record_trajectory: bool = False
    record_every: int = 1
    record_iterates: bool = False
    lyapunov_reference: np.ndarray | None = None
    abs_tol: float = 1e-7
    rel_tol: float = 1e-7
    min_step: float = 1e-8
    max_step: float | None = None

    def __post_init__(self):
        if self.integrator not in ("euler", "rk4", "adaptive"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if self.step_size is not None and self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.record_every < 1:
            raise ValueError("record_every must be at least 1")


@dataclass
class Trajectory:
    """Per-step records captured during a solve."""

    steps: list = field(default_factory=list)
    times: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    objectives: list = field(default_factory=list)
    lyapunov: list | None = None
    iterates: list | None = None

    def to_csv(self, path) -> None:
        cols = ["step", "time", "residual_inf", "primal_objective"]
        if self.lyapunov is not None:
            cols.append("lyapunov")
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for i in range(len(self.steps)):
                row = [
                    str(self.steps[i]),
                    format(self.times[i], ".17g"),
                    format(self.residuals[i], ".17g"),
                    format(self.objectives[i], ".17g"),
                ]
                if self.lyapunov is not None:
                    row.append(format(self.lyapunov[i], ".17g"))
                fh.write(",".join(row) + "\n")


@dataclass
class SolveResult:
    x: np.ndarray
    status: SolveStatus
    steps_taken: int
    final_residual: float
    objective: float
    step_size: float
    elapsed: float
    trajectory: Trajectory | None = None

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.CONVERGED


def rhs(inst: ProblemInstance, cache: GramCache, x: np.ndarray) -> np.ndarray:
    """Right-hand side F(x) of the network dynamics."""
    w = cache.apply(x) - cache.atb
    return box_project(inst.lam, w - x) - w


def step_euler(inst: ProblemInstance, cache: GramCache, x, h: float) -> np.ndarray:
    """One forward Euler step x + h F(x)."""
    if h <= 0:
        raise ValueError("h must be positive")
    x = np.asarray(x, dtype=np.float64).ravel()
    return x + h * rhs(inst, cache, x)


def fixed_point_residual(inst: ProblemInstance, cache: GramCache, x) -> float:
    """||P(w - x) - w||_inf at w = A^T A x - A^T b; zero iff x is optimal."""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.shape[0] != cache.l:
        raise DimensionMismatchError("point x", (cache.l,), x.shape)
    return float(np.abs(rhs(inst, cache, x)).max())


def default_step_size(cache: GramCache) -> float:
    return 1.0 / (1.0 + cache.gram_norm_ub)


def _lyapunov_value(cache: GramCache, x: np.ndarray, ref: np.ndarray) -> float:
    d = x - ref
    return float(0.5 * (d @ (d + cache.apply(d))))


def solve(
    inst: ProblemInstance,
    cache: GramCache,
    config: SolverConfig | None = None,
    x0=None,
) -> SolveResult:
    """Integrate the dynamics from x0 (default 0) until the residual
    drops to config.tol, max_steps is hit, or the iterate blows up."""
    if config is None:
        config = SolverConfig()
    l = cache.l
    if x0 is None:
        x = np.zeros(l)
    else:
        x = np.array(x0, dtype=np.float64).ravel()
        if x.shape[0] != l:
            raise DimensionMismatchError("initial point x0", (l,), x.shape)
        if not np.all(np.isfinite(x)):
            raise NonFiniteInputError("x0 contains non-finite entries")

    h = config.step_size if config.step_size is not None else default_step_size(cache)
    max_h = config.max_step
    if max_h is None:
        # stay inside the step regime where the energy decrease argument holds
        max_h = max(h, 1.9 / (1.0 + cache.gram_norm_ub))

    traj = None
    ref = None
    if config.record_trajectory:
        traj = Trajectory()
        if config.lyapunov_reference is not None:
            ref = np.asarray(config.lyapunov_reference, dtype=np.float64).ravel()
            if ref.shape[0] != l:
                raise DimensionMismatchError("lyapunov reference", (l,), ref.shape)
            traj.lyapunov = []
        if config.record_iterates:
            traj.iterates = []

    def record(step, t, resid, x):
        if traj is None:
            return
        traj.steps.append(step)
        traj.times.append(t)
        traj.residuals.append(resid)
        traj.objectives.append(primal_objective(inst, x))
        if traj.lyapunov is not None:
            traj.lyapunov.append(_lyapunov_value(cache, x, ref))
        if traj.iterates is not None:
            traj.iterates.append(x.copy())

    started = _time.perf_counter()
    t = 0.0
    steps = 0
    f = rhs(inst, cache, x)
    while True:
        resid = float(np.abs(f).max())
        status = None
        if resid <= config.tol:
            status = SolveStatus.CONVERGED
        elif not np.isfinite(resid) or np.abs(x).max() > DIVERGENCE_THRESHOLD:
            status = SolveStatus.DIVERGED
        elif steps >= config.max_steps:
            status = SolveStatus.MAX_STEPS_REACHED
        if status is not None or steps % config.record_every == 0:
            record(steps, t, resid, x)
        if status is not None:
            break

        if config.integrator == "euler":
            x = x + h * f
            t += h
        elif config.integrator == "rk4":
            k2 = rhs(inst, cache, x + 0.5 * h * f)
            k3 = rhs(inst, cache, x + 0.5 * h * k2)
            k4 = rhs(inst, cache, x + h * k3)
            x = x + (h / 6.0) * (f + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        else:  # adaptive Euler with step-doubling error control
            err_tol = config.abs_tol + config.rel_tol * float(np.abs(x).max())
            while True:
                x_half = x + 0.5 * h * f
                f_half = rhs(inst, cache, x_half)
                err = 0.5 * float(np.abs(h * (f - f_half)).max())
                accept = err <= err_tol or h <= config.min_step
                if accept:
                    t += h
                    x = x_half + 0.5 * h * f_half
                # proportional controller for a first-order method
                scale = 0.9 * np.sqrt(err_tol / err) if err > 0 else 2.0
                h = min(max(h * min(max(scale, 0.2), 2.0), config.min_step), max_h)
                if accept:
                    break

        steps += 1
        f = rhs(inst, cache, x)

    elapsed = _time.perf_counter() - started
    return SolveResult(
        x=x,
        status=status,
        steps_taken=steps,
        final_residual=resid,
        objective=primal_objective(inst, x),
        step_size=h,
        elapsed=elapsed,
        trajectory=traj,
    )
