"""Synthetic sparse-recovery experiment generation.

An ExperimentSpec pins everything needed to reproduce one compressed
sensing instance: a spike signal x0 with `spikes` nonzeros drawn from
amplitude_set, an n-by-l standard normal measurement matrix (rows
optionally orthonormalized), Gaussian noise of standard deviation sigma
added to x0 before measurement, and the rule lambda =
lambda_factor * ||A^T b||_inf. Identical seeds give bit-identical output.
"""

import json
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DimensionMismatchError

__all__ = [
    "ExperimentSpec",
    "RecoveryMetrics",
    "generate",
    "recovery_metrics",
    "least_norm_solution",
]


@dataclass(frozen=True)
class ExperimentSpec:
    """Reproducible recipe for one synthetic instance."""

    n: int
    l: int
    spikes: int
    sigma: float = 0.0
    lambda_factor: float = 0.01
    seed: int = 0
    orthogonalize_rows: bool = True
    amplitude_set: tuple = (-1.0, 1.0)
    noise_on_observation: bool = False

    def __post_init__(self):
        if self.n < 1 or self.l < 1:
            raise ValueError("n and l must be positive")
        if not 0 <= self.spikes <= self.l:
            raise ValueError(f"spikes must lie in [0, l], got {self.spikes}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.lambda_factor <= 0:
            raise ValueError("lambda_factor must be positive")
        if len(self.amplitude_set) == 0:
            raise ValueError("amplitude_set must be nonempty")
        object.__setattr__(
            self, "amplitude_set", tuple(float(a) for a in self.amplitude_set)
        )
        if self.orthogonalize_rows and self.n > self.l:
            raise ValueError(
                f"cannot orthonormalize {self.n} rows of length {self.l}"
            )

    def to_json(self, indent: int = 2) -> str:
        d = asdict(self)
        d["amplitude_set"] = list(self.amplitude_set)
        return json.dumps(d, indent=indent)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        d = json.loads(text)
        if "amplitude_set" in d:
            d["amplitude_set"] = tuple(d["amplitude_set"])
        return cls(**d)


def generate(spec: ExperimentSpec):
    """Draw (x0, A, b, lam) from the spec's seeded RNG stream.

    Draw order is fixed (spike positions, amplitudes, matrix, noise) so
    output is bit-identical for a given seed. Noise is added to x0 before
    measurement, b = A (x0 + eps); the noise_on_observation flag switches
    to b = A x0 + eps for sensitivity studies. With orthonormal rows the
    two protocols coincide in distribution.
    """
    if spec.n > spec.l:
        warnings.warn(
            f"n={spec.n} > l={spec.l}: instance is overdetermined, "
            "not a sparse-recovery scenario",
            stacklevel=2,
        )
    rng = np.random.default_rng(spec.seed)
    x0 = np.zeros(spec.l)
    positions = rng.choice(spec.l, size=spec.spikes, replace=False)
    amplitudes = rng.choice(np.asarray(spec.amplitude_set), size=spec.spikes)
    x0[positions] = amplitudes
    A = rng.standard_normal((spec.n, spec.l))
    if spec.orthogonalize_rows:
        q, _ = np.linalg.qr(A.T)
        A = np.ascontiguousarray(q[:, : spec.n].T)
    if spec.sigma > 0:
        eps = spec.sigma * rng.standard_normal(spec.n if spec.noise_on_observation else spec.l)
    else:
        eps = None
    if spec.noise_on_observation:
        b = A @ x0 + (eps if eps is not None else 0.0)
    else:
        b = A @ (x0 + eps) if eps is not None else A @ x0
    lam = spec.lambda_factor * float(np.abs(A.T @ b).max())
    return x0, A, b, lam


@dataclass(frozen=True)
class RecoveryMetrics:
    """How well xhat matches the ground-truth spikes."""

    relative_l2_error: float
    precision: float
    recall: float
    support_threshold: float
    relative_error_is_absolute: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def recovery_metrics(x0, xhat, support_threshold: float = 0.5) -> RecoveryMetrics:
    """Relative l2 error plus support precision/recall at the threshold.

    The default threshold 0.5 is the midpoint decision boundary for unit
    spikes. When x0 = 0 the error is reported as the absolute norm of xhat
    and flagged as such. Precision with no predicted spikes is 1 (nothing
    claimed, nothing wrong); recall with no true spikes is 1.
    """
    x0 = np.asarray(x0, dtype=np.float64).ravel()
    xhat = np.asarray(xhat, dtype=np.float64).ravel()
    if x0.shape != xhat.shape:
        raise DimensionMismatchError("xhat against x0", x0.shape, xhat.shape)
    err = float(np.linalg.norm(xhat - x0))
    norm0 = float(np.linalg.norm(x0))
    if norm0 > 0:
        rel = err / norm0
        absolute = False
    else:
        rel = err
        absolute = True
    predicted = np.abs(xhat) > support_threshold
    actual = x0 != 0
    tp = int(np.count_nonzero(predicted & actual))
    npred = int(np.count_nonzero(predicted))
    nact = int(np.count_nonzero(actual))
    precision = tp / npred if npred else 1.0
    recall = tp / nact if nact else 1.0
    return RecoveryMetrics(
        relative_l2_error=rel,
        precision=precision,
        recall=recall,
        support_threshold=float(support_threshold),
        relative_error_is_absolute=absolute,
    )


def least_norm_solution(A, b) -> np.ndarray:
    """Minimum-l2-norm solution of A x = b, namely A^T (A A^T)^{-1} b.

    This is the classical dense-signal comparison point for sparse
    recovery; when the rows of A are orthonormal it reduces to A^T b.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).ravel()
    if b.shape[0] != A.shape[0]:
        raise DimensionMismatchError("vector b against A", (A.shape[0],), b.shape)
    return A.T @ np.linalg.solve(A @ A.T, b)
