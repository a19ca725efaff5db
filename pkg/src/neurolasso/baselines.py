"""Reference solvers used to cross-validate the network dynamics.

ista_solve and fista_solve are proximal-gradient methods sharing the
solver's stopping rule (the fixed-point residual), so every method in the
library is judged by one optimality yardstick. sign_pattern_oracle solves
small instances exactly by enumerating all 3^l sign patterns, giving an
independent ground truth the iterative solvers must match.
"""

import time as _time
from dataclasses import dataclass

import numpy as np

from .dynamics import SolveResult, SolveStatus, Trajectory
from .errors import DimensionMismatchError, OracleInconclusiveError
from .problem import GramCache, ProblemInstance, primal_objective
from .projection import box_project, soft_threshold

__all__ = [
    "BaselineConfig",
    "ista_solve",
    "fista_solve",
    "sign_pattern_oracle",
]

ORACLE_MAX_L = 12
ORACLE_SLACK = 1e-10
_PIVOT_RTOL = 1e-12


@dataclass
class BaselineConfig:
    """Settings for the proximal-gradient baselines.

    step defaults to 1/gram_norm_ub, which guarantees monotone objective
    descent for ISTA; larger explicit steps are rejected.
    """

    method: str = "ista"
    step: float | None = None
    tol: float = 1e-8
    max_iters: int = 500_000
    record_trajectory: bool = False

    def __post_init__(self):
        if self.method not in ("ista", "fista"):
            raise ValueError(f"unknown baseline method {self.method!r}")
        if self.step is not None and self.step <= 0:
            raise ValueError("step must be positive")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


def _baseline_step(cache: GramCache, config: BaselineConfig) -> float:
    ub = cache.gram_norm_ub
    if config.step is None:
        return 1.0 if ub == 0.0 else 1.0 / ub
    if ub > 0.0 and config.step > 1.0 / ub:
        raise ValueError(
            f"step {config.step} exceeds the descent-safe bound {1.0 / ub}"
        )
    return config.step


def _start_point(cache: GramCache, x0) -> np.ndarray:
    if x0 is None:
        return np.zeros(cache.l)
    x = np.array(x0, dtype=np.float64).ravel()
    if x.shape[0] != cache.l:
        raise DimensionMismatchError("initial point x0", (cache.l,), x.shape)
    return x


def _residual_from_gradient(lam: float, x: np.ndarray, g: np.ndarray) -> float:
    return float(np.abs(box_project(lam, g - x) - g).max())


def ista_solve(
    inst: ProblemInstance,
    cache: GramCache,
    config: BaselineConfig | None = None,
    x0=None,
) -> SolveResult:
    """Proximal gradient: x <- soft_threshold(step*lam, x - step*grad).

    Stops when the fixed-point residual drops to config.tol. The trajectory,
    when recorded, uses the iteration index as its time column.
    """
    if config is None:
        config = BaselineConfig(method="ista")
    step = _baseline_step(cache, config)
    x = _start_point(cache, x0)
    traj = Trajectory() if config.record_trajectory else None

    started = _time.perf_counter()
    k = 0
    while True:
        g = cache.apply(x) - cache.atb
        resid = _residual_from_gradient(inst.lam, x, g)
        if traj is not None:
            traj.steps.append(k)
            traj.times.append(float(k))
            traj.residuals.append(resid)
            traj.objectives.append(primal_objective(inst, x))
        if resid <= config.tol:
            status = SolveStatus.CONVERGED
            break
        if k >= config.max_iters:
            status = SolveStatus.MAX_STEPS_REACHED
            break
        x = soft_threshold(step * inst.lam, x - step * g)
        k += 1

    return SolveResult(
        x=x,
        status=status,
        steps_taken=k,
        final_residual=resid,
        objective=primal_objective(inst, x),
        step_size=step,
        elapsed=_time.perf_counter() - started,
        trajectory=traj,
    )


def fista_solve(
    inst: ProblemInstance,
    cache: GramCache,
    config: BaselineConfig | None = None,
    x0=None,
) -> SolveResult:
    """Nesterov-accelerated variant of ista_solve; same fixed points and
    stopping rule, usually far fewer iterations."""
    if config is None:
        config = BaselineConfig(method="fista")
    step = _baseline_step(cache, config)
    x = _start_point(cache, x0)
    y = x.copy()
    t = 1.0
    traj = Trajectory() if config.record_trajectory else None

    started = _time.perf_counter()
    k = 0
    while True:
        g = cache.apply(x) - cache.atb
        resid = _residual_from_gradient(inst.lam, x, g)
        if traj is not None:
            traj.steps.append(k)
            traj.times.append(float(k))
            traj.residuals.append(resid)
            traj.objectives.append(primal_objective(inst, x))
        if resid <= config.tol:
            status = SolveStatus.CONVERGED
            break
        if k >= config.max_iters:
            status = SolveStatus.MAX_STEPS_REACHED
            break
        gy = cache.apply(y) - cache.atb
        x_next = soft_threshold(step * inst.lam, y - step * gy)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = x_next + ((t - 1.0) / t_next) * (x_next - x)
        x, t = x_next, t_next
        k += 1

    return SolveResult(
        x=x,
        status=status,
        steps_taken=k,
        final_residual=resid,
        objective=primal_objective(inst, x),
        step_size=step,
        elapsed=_time.perf_counter() - started,
        trajectory=traj,
    )


def sign_pattern_oracle(inst: ProblemInstance, cache: GramCache) -> np.ndarray:
    """Exact solution by exhaustive enumeration of sign patterns, l <= 12.

    Every candidate s in {-1, 0, +1}^l is visited grouped by its support S.
    For each S the restricted normal equations
        (A^T A)_SS x_S = (A^T b)_S - lam * s_S
    are solved for all 2^|S| sign assignments in one multi-RHS solve; a
    pattern is accepted iff sign(x_S) = s_S componentwise and every
    off-support coordinate satisfies |A_j^T (b - A x)| <= lam + 1e-10.
    Supports with a singular restricted Gram are skipped, which can never
    produce a false acceptance. The accepted solution with the smallest
    primal objective wins; ties keep the earliest pattern in the fixed
    enumeration order (supports by ascending bitmask, signs likewise).

    Raises OracleInconclusiveError when no pattern is accepted.
    """
    l = cache.l
    if l > ORACLE_MAX_L:
        raise ValueError(f"oracle caps at l = {ORACLE_MAX_L}, got {l}")
    gram = cache.dense_gram()
    atb = cache.atb
    lam = inst.lam

    best_x = None
    best_obj = np.inf
    indices = np.arange(l)
    for mask in range(1 << l):
        sup = indices[(mask >> indices) & 1 == 1]
        k = sup.size
        if k == 0:
            if np.abs(atb).max() <= lam + ORACLE_SLACK:
                x = np.zeros(l)
                obj = primal_objective(inst, x)
                if obj < best_obj:
                    best_obj, best_x = obj, x
            continue
        sub = gram[np.ix_(sup, sup)]
        try:
            low = np.linalg.cholesky(sub)
        except np.linalg.LinAlgError:
            continue
        pivots = np.diag(low) ** 2
        if pivots.min() < _PIVOT_RTOL * max(pivots.max(), 1.0):
            continue
        # columns of signs: all 2^k assignments of {-1,+1} over the support
        bits = (np.arange(1 << k)[None, :] >> np.arange(k)[:, None]) & 1
        signs = 2.0 * bits - 1.0
        rhs = atb[sup][:, None] - lam * signs
        xs = np.linalg.solve(low.T, np.linalg.solve(low, rhs))
        sign_ok = np.all(np.sign(xs) == signs, axis=0)
        if not sign_ok.any():
            continue
        off = indices[(mask >> indices) & 1 == 0]
        for col in np.flatnonzero(sign_ok):
            x = np.zeros(l)
            x[sup] = xs[:, col]
            if off.size:
                z_off = atb[off] - gram[np.ix_(off, sup)] @ xs[:, col]
                if np.abs(z_off).max() > lam + ORACLE_SLACK:
                    continue
            obj = primal_objective(inst, x)
            if obj < best_obj:
                best_obj, best_x = obj, x

    if best_x is None:
        raise OracleInconclusiveError(
            "no sign pattern was accepted; instance is degenerate"
        )
    return best_x
