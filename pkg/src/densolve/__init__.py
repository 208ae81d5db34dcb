"""Dense linear-system solvers over pluggable compute backends.

Stationary iterations (Jacobi, Gauss-Seidel), Krylov methods (CG, restarted
GMRES, BiCGSTAB), direct factorizations (unblocked/blocked LU with partial
pivoting, Cholesky), and a benchmark harness with a CLI.
"""

from .backends import (
    Backend,
    BackendCounters,
    BlockedBackend,
    ReferenceBackend,
    get_backend,
)
from .core import (
    CholeskyFactor,
    DegenerateRhsError,
    DimensionError,
    LinAlgError,
    LuFactors,
    NotSpdError,
    PrecisionError,
    SingularMatrixError,
    SolveReport,
    SolverConfig,
    apply_pivots,
    apply_pivots_inverse,
    permutation_matrix,
    permutation_sign,
    relative_residual,
    unit_roundoff,
)
from .direct import (
    backward_substitution,
    cholesky_factor,
    cholesky_solve,
    forward_substitution,
    lu_factor_blocked,
    lu_factor_unblocked,
    lu_solve,
)
from .harness import (
    BenchRecord,
    ProblemSpec,
    emit_report,
    generate_matrix,
    generate_problem,
    read_matrix_market,
    run_benchmark,
    solve_system,
)
from .krylov import bicgstab_solve, cg_solve, gmres_solve
from .stationary import gauss_seidel_solve, jacobi_solve

__version__ = "0.1.0"

__all__ = [
    "Backend", "BackendCounters", "BlockedBackend", "ReferenceBackend", "get_backend",
    "CholeskyFactor", "LuFactors", "SolveReport", "SolverConfig",
    "LinAlgError", "DimensionError", "PrecisionError", "DegenerateRhsError",
    "SingularMatrixError", "NotSpdError",
    "relative_residual", "unit_roundoff",
    "apply_pivots", "apply_pivots_inverse", "permutation_matrix", "permutation_sign",
    "lu_factor_unblocked", "lu_factor_blocked", "lu_solve",
    "cholesky_factor", "cholesky_solve",
    "forward_substitution", "backward_substitution",
    "jacobi_solve", "gauss_seidel_solve",
    "cg_solve", "gmres_solve", "bicgstab_solve",
    "ProblemSpec", "BenchRecord", "generate_matrix", "generate_problem",
    "read_matrix_market", "run_benchmark", "solve_system", "emit_report",
]
