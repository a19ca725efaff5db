"""Problem definition: the l1-regularized least squares instance and its Gram cache.

An instance is the triple (A, b, lam) for

    min_x  0.5 * ||A x - b||_2^2 + lam * ||x||_1

with A an n-by-l dense real matrix, b a length-n observation and lam >= 0.
Every downstream operation consumes A^T A and A^T b, so both are computed
once at build time and shared through an immutable :class:`GramCache`.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, DualUnavailableError, NonFiniteInputError

__all__ = [
    "ProblemInstance",
    "GramCache",
    "build_instance",
    "primal_objective",
    "smooth_problem_check",
    "dual_objective",
]

# Relative pivot cutoff below which the Gram matrix is declared singular.
GRAM_PIVOT_RTOL = 1e-10


def _as_readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


def _require_finite(name: str, a: np.ndarray) -> None:
    if not np.all(np.isfinite(a)):
        raise NonFiniteInputError(f"{name} contains non-finite entries")


@dataclass(frozen=True)
class ProblemInstance:
    """Immutable problem data (A, b, lam)."""

    A: np.ndarray
    b: np.ndarray
    lam: float

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def l(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class GramCache:
    """Cached Gram quantities shared by solvers and certification.

    ``gram`` is the dense l-by-l matrix A^T A, or None when the cache was
    built matrix-free, in which case products are applied as A^T (A x).
    ``gram_norm_ub`` always dominates the spectral norm of A^T A.
    """

    atb: np.ndarray
    gram_norm_ub: float
    gram: np.ndarray | None = None
    matrix_free: bool = False
    _A: np.ndarray | None = field(default=None, repr=False)

    @property
    def l(self) -> int:
        return self.atb.shape[0]

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Return A^T A x without ever forming an inverse."""
        if self.matrix_free:
            return self._A.T @ (self._A @ x)
        return self.gram @ x

    def dense_gram(self) -> np.ndarray:
        """The dense Gram matrix; computed on demand in matrix-free mode."""
        if self.gram is not None:
            return self.gram
        return self._A.T @ self._A


def build_instance(
    A, b, lam: float, matrix_free: bool = False
) -> tuple[ProblemInstance, GramCache]:
    """Validate inputs and precompute the Gram cache.

    Parameters
    ----------
    A : array_like, shape (n, l)
        Measurement/basis matrix, n >= 1 rows and l >= 1 columns.
    b : array_like, shape (n,)
        Observation vector.
    lam : float
        Nonnegative regularization weight.
    matrix_free : bool
        When True, A^T A is never formed; products apply A twice. Semantics
        of every downstream operation are identical.

    Returns
    -------
    (ProblemInstance, GramCache)

    Notes
    -----
    ``gram_norm_ub`` is the maximum absolute row sum of A^T A (its infinity
    norm), which dominates the spectral norm of a symmetric matrix. In
    matrix-free mode the same bound is taken on the smaller of A^T A and
    A A^T (their nonzero spectra coincide), falling back to the product
    bound ||A||_1 * ||A||_inf when n > l.
    """
    A = np.atleast_2d(np.asarray(A, dtype=np.float64))
    b = np.asarray(b, dtype=np.float64).ravel()
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise DimensionMismatchError("matrix A", ("n>=1", "l>=1"), A.shape)
    if b.shape[0] != A.shape[0]:
        raise DimensionMismatchError("vector b against A", (A.shape[0],), b.shape)
    _require_finite("A", A)
    _require_finite("b", b)
    lam = float(lam)
    if not np.isfinite(lam) or lam < 0:
        raise ValueError(f"lam must be finite and nonnegative, got {lam}")

    A = _as_readonly(A)
    b = _as_readonly(b)
    atb = _as_readonly(A.T @ b)

    if matrix_free:
        n, l = A.shape
        if n <= l:
            row_gram = A @ A.T
            ub = float(np.abs(row_gram).sum(axis=1).max())
        else:
            ub = float(np.abs(A).sum(axis=0).max() * np.abs(A).sum(axis=1).max())
        cache = GramCache(
            atb=atb, gram_norm_ub=ub, gram=None, matrix_free=True, _A=A
        )
    else:
        gram = _as_readonly(A.T @ A)
        ub = float(np.abs(gram).sum(axis=1).max())
        cache = GramCache(atb=atb, gram_norm_ub=ub, gram=gram)

    return ProblemInstance(A=A, b=b, lam=lam), cache


def _check_point(inst_or_cache, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).ravel()
    l = inst_or_cache.l
    if x.shape[0] != l:
        raise DimensionMismatchError("point x", (l,), x.shape)
    return x


def primal_objective(inst: ProblemInstance, x) -> float:
    """Evaluate 0.5 * ||A x - b||_2^2 + lam * ||x||_1."""
    x = _check_point(inst, x)
    r = inst.A @ x - inst.b
    return float(0.5 * (r @ r) + inst.lam * np.abs(x).sum())


def smooth_problem_check(inst: ProblemInstance, cache: GramCache, x) -> tuple[float, float]:
    """Quadratic objective and constraint violation of the box-constrained form.

    Returns ``(x^T A^T A x, max_i max(|(A^T A x - A^T b)_i| - lam, 0))``.
    The violation is zero exactly when A^T A x - A^T b lies in the box
    [-lam, lam]^l, which holds at every optimal point of the l1 problem.
    """
    x = _check_point(cache, x)
    gx = cache.apply(x)
    objective = float(x @ gx)
    g = gx - cache.atb
    max_violation = float(np.maximum(np.abs(g) - inst.lam, 0.0).max())
    return objective, max_violation


def _gram_cholesky(cache: GramCache) -> np.ndarray:
    if cache.matrix_free or cache.gram is None:
        raise DualUnavailableError(
            "dual objective needs the dense Gram matrix; rebuild without matrix_free"
        )
    try:
        low = np.linalg.cholesky(cache.gram)
    except np.linalg.LinAlgError as exc:
        raise DualUnavailableError(f"Gram matrix is not positive definite: {exc}") from exc
    pivots = np.diag(low) ** 2
    cutoff = GRAM_PIVOT_RTOL * cache.gram_norm_ub
    if pivots.min() < cutoff:
        raise DualUnavailableError(
            f"Gram matrix is numerically singular (pivot {pivots.min():.3e} "
            f"below {cutoff:.3e})"
        )
    return low


def dual_objective(cache: GramCache, z) -> float:
    """Evaluate 0.5 * z^T (A^T A)^{-1} z - z^T (A^T A)^{-1} A^T b.

    Computed through triangular solves against the Cholesky factor of the
    Gram matrix; the inverse is never formed. Raises
    :class:`DualUnavailableError` when the Gram matrix is singular or only
    available matrix-free. The main solver path never needs this quantity.
    """
    z = _check_point(cache, z)
    low = _gram_cholesky(cache)
    # (A^T A)^{-1} v via two triangular solves
    yz = np.linalg.solve(low.T, np.linalg.solve(low, z))
    yb = np.linalg.solve(low.T, np.linalg.solve(low, cache.atb))
    return float(0.5 * (z @ yz) - z @ yb)
