"""neurolasso: a lasso solver built on a projection-network ODE.

The solver integrates dx/dt = P(w - x) - w with w = A^T A x - A^T b and P
the componentwise clamp to [-lam, lam]; its equilibria are exactly the
minimizers of 0.5 ||Ax - b||^2 + lam ||x||_1, and ||F(x)||_inf serves as a
certifiable optimality residual. The package adds ISTA/FISTA baselines, an
exact small-instance oracle, KKT certification, synthetic experiment
generation, and a CLI.
"""

__version__ = "0.1.0"

from .baselines import BaselineConfig, fista_solve, ista_solve, sign_pattern_oracle
from .certification import (
    Certificate,
    LyapunovMonitor,
    certify,
    dual_from_primal,
    fixed_point_residual,
    lyapunov_value,
    multiplier_split,
)
from .dynamics import (
    SolveResult,
    SolverConfig,
    SolveStatus,
    Trajectory,
    default_step_size,
    rhs,
    solve,
)
from .errors import (
    DimensionMismatchError,
    DualUnavailableError,
    MatrixFormatError,
    NeuroLassoError,
    NonFiniteInputError,
    OracleInconclusiveError,
)
from .matio import (
    load_matrix,
    load_vector,
    save_matrix,
    save_vector,
)
from .problem import (
    GramCache,
    ProblemInstance,
    build_instance,
    dual_objective,
    primal_objective,
    smooth_problem_check,
)
from .projection import Box, box_project, soft_threshold
from .synth import (
    ExperimentSpec,
    RecoveryMetrics,
    generate,
    least_norm_solution,
    recovery_metrics,
)

__all__ = [
    "__version__",
    "BaselineConfig",
    "Box",
    "Certificate",
    "DimensionMismatchError",
    "DualUnavailableError",
    "ExperimentSpec",
    "GramCache",
    "LyapunovMonitor",
    "MatrixFormatError",
    "NeuroLassoError",
    "NonFiniteInputError",
    "OracleInconclusiveError",
    "ProblemInstance",
    "RecoveryMetrics",
    "SolveResult",
    "SolveStatus",
    "SolverConfig",
    "Trajectory",
    "box_project",
    "build_instance",
    "certify",
    "default_step_size",
    "dual_from_primal",
    "dual_objective",
    "fista_solve",
    "fixed_point_residual",
    "generate",
    "ista_solve",
    "least_norm_solution",
    "load_matrix",
    "load_vector",
    "lyapunov_value",
    "multiplier_split",
    "primal_objective",
    "recovery_metrics",
    "rhs",
    "save_matrix",
    "save_vector",
    "sign_pattern_oracle",
    "smooth_problem_check",
    "soft_threshold",
    "solve",
]
