"""Optimality certificates for candidate solutions.

A candidate x is optimal iff the box projection of w - x lands back on w,
where w = A^T A x - A^T b. The certificate bundles that residual with the
dual vector z = -w, the nonnegative multiplier split x = u - v, and the
feasibility/slackness checks a KKT point must satisfy. A failing
certificate is a result, not an error.

The Lyapunov monitor evaluates the energy V(x) = 0.5 (x - x*)^T (I + A^T A)
(x - x*) against a reference solution x*; along the solver's trajectory at
the default step this sequence is nonincreasing.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .dynamics import fixed_point_residual, rhs
from .problem import GramCache, ProblemInstance
from .projection import box_project

__all__ = [
    "Certificate",
    "LyapunovMonitor",
    "fixed_point_residual",
    "dual_from_primal",
    "multiplier_split",
    "certify",
    "lyapunov_value",
]


def dual_from_primal(cache: GramCache, x) -> np.ndarray:
    """Dual vector z = A^T b - A^T A x; at optimality z = P(z + x)."""
    x = np.asarray(x, dtype=np.float64).ravel()
    return cache.atb - cache.apply(x)


def multiplier_split(x) -> tuple[np.ndarray, np.ndarray]:
    """Split x into nonnegative multipliers (u, v) with x = u - v, u o v = 0.

    Coordinates with x_i = 0 get u_i = v_i = 0, the minimal-norm choice.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    return np.maximum(x, 0.0), np.maximum(-x, 0.0)


@dataclass(frozen=True)
class Certificate:
    """Optimality evidence for one candidate point."""

    fixed_point_residual_inf: float
    z: np.ndarray
    box_feasible: bool
    max_box_violation: float
    slackness_violation: float
    u: np.ndarray
    v: np.ndarray
    multiplier_identity_error: float
    dual_restatement_gap: float
    tol: float

    @property
    def passed(self) -> bool:
        return (
            self.fixed_point_residual_inf <= self.tol
            and self.box_feasible
            and self.slackness_violation <= self.tol
        )

    def as_dict(self) -> dict:
        return {
            "fixed_point_residual_inf": self.fixed_point_residual_inf,
            "max_box_violation": self.max_box_violation,
            "slackness_violation": self.slackness_violation,
            "multiplier_identity_error": self.multiplier_identity_error,
            "dual_restatement_gap": self.dual_restatement_gap,
            "tol": self.tol,
            "box_feasible": self.box_feasible,
            "passed": self.passed,
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.as_dict(), indent=indent)


def certify(
    inst: ProblemInstance, cache: GramCache, x, tol: float = 1e-8
) -> Certificate:
    """Build the full certificate for x at tolerance tol.

    slackness_violation is taken over the numerical support |x_i| > tol:
    on it, z_i must sit on the box face lam * sign(x_i). The same tol acts
    as the support threshold, so there is a single knob.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    residual = float(np.abs(rhs(inst, cache, x)).max())
    z = dual_from_primal(cache, x)
    max_box_violation = float(np.maximum(np.abs(z) - inst.lam, 0.0).max())
    support = np.abs(x) > tol
    if support.any():
        slackness = float(
            np.abs(z[support] - inst.lam * np.sign(x[support])).max()
        )
    else:
        slackness = 0.0
    u, v = multiplier_split(x)
    identity_error = float(np.abs((u - v) - x).max())
    restatement_gap = float(np.abs(z - box_project(inst.lam, z + x)).max())
    return Certificate(
        fixed_point_residual_inf=residual,
        z=z,
        box_feasible=max_box_violation <= tol,
        max_box_violation=max_box_violation,
        slackness_violation=slackness,
        u=u,
        v=v,
        multiplier_identity_error=identity_error,
        dual_restatement_gap=restatement_gap,
        tol=tol,
    )


@dataclass
class LyapunovMonitor:
    """Tracks V(x) = 0.5 (x - x*)^T (I + A^T A) (x - x*) against a reference.

    The metric I + A^T A dominates the identity, so values sandwich the
    squared distance: 0.5 ||x - x*||^2 <= V(x) <= 0.5 (1 + U) ||x - x*||^2
    with U = cache.gram_norm_ub. The metric is applied as an operator and
    never factored.
    """

    cache: GramCache
    reference: np.ndarray
    values: list = field(default_factory=list)

    def __post_init__(self):
        ref = np.asarray(self.reference, dtype=np.float64).ravel()
        object.__setattr__(self, "reference", ref)

    def value(self, x) -> float:
        d = np.asarray(x, dtype=np.float64).ravel() - self.reference
        return float(0.5 * (d @ (d + self.cache.apply(d))))

    def observe(self, x) -> float:
        v = self.value(x)
        self.values.append(v)
        return v


def lyapunov_value(monitor: LyapunovMonitor, x) -> float:
    """Evaluate the monitor's energy at x without recording it."""
    return monitor.value(x)
