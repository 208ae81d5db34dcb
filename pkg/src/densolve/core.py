"""Shared numeric types: matrices, pivots, factor containers, solver config/report.

Matrices are plain numpy arrays in Fortran (column-major) order; vectors are
1-d numpy arrays.  All objects participating in one solve must share a single
floating-point precision (float32 or float64).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SUPPORTED_DTYPES = (np.float32, np.float64)


class LinAlgError(Exception):
    """Base class for all solver-library errors."""


class DimensionError(LinAlgError):
    """Operand shapes do not conform."""


class PrecisionError(LinAlgError):
    """Operands mix float32 and float64 within one solve."""


class DegenerateRhsError(LinAlgError):
    """Right-hand side has zero norm; relative residual is undefined."""


class SingularMatrixError(LinAlgError):
    """Matrix is singular (or has a zero diagonal where one is required)."""


class NotSpdError(LinAlgError):
    """Matrix is not symmetric positive definite."""

    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


def unit_roundoff(dtype) -> float:
    """Unit roundoff u = eps/2 of the given floating-point dtype."""
    return float(np.finfo(np.dtype(dtype)).eps) / 2.0


def check_precision(*arrays) -> np.dtype:
    """Assert all arrays share one supported float dtype; return it."""
    dtypes = {a.dtype for a in arrays}
    if len(dtypes) != 1:
        raise PrecisionError(f"mixed precisions in one solve: {sorted(map(str, dtypes))}")
    dtype = dtypes.pop()
    if dtype.type not in SUPPORTED_DTYPES:
        raise PrecisionError(f"unsupported scalar type {dtype}")
    return dtype


def check_square(A: np.ndarray) -> int:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"matrix must be square, got shape {A.shape}")
    return A.shape[0]


def check_system(A: np.ndarray, *vectors: np.ndarray) -> int:
    """Validate a square system A with conformant vectors; return n."""
    n = check_square(A)
    for v in vectors:
        if v.ndim != 1 or v.shape[0] != n:
            raise DimensionError(f"vector of shape {v.shape} does not conform to {n}x{n} matrix")
    check_precision(A, *vectors)
    return n


def zeros_matrix(rows: int, cols: int, dtype=np.float64) -> np.ndarray:
    """Fresh column-major matrix of zeros."""
    return np.zeros((rows, cols), dtype=dtype, order="F")


def as_matrix(a, dtype=None) -> np.ndarray:
    """Coerce to a column-major 2-d array (copying only if needed)."""
    a = np.asfortranarray(a, dtype=dtype)
    if a.ndim != 2:
        raise DimensionError(f"expected 2-d matrix, got ndim={a.ndim}")
    return a


# ---------------------------------------------------------------------------
# Permutations from partial pivoting
# ---------------------------------------------------------------------------

def apply_pivots(pivots: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Apply the recorded row swaps in order k = 0..len-1 to a copy of v."""
    out = v.copy()
    for k, p in enumerate(pivots):
        if p != k:
            out[[k, p]] = out[[p, k]]
    return out


def apply_pivots_inverse(pivots: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Undo apply_pivots (swaps in reverse order)."""
    out = v.copy()
    for k in range(len(pivots) - 1, -1, -1):
        p = pivots[k]
        if p != k:
            out[[k, p]] = out[[p, k]]
    return out


def permutation_matrix(pivots: np.ndarray, n: int, dtype=np.float64) -> np.ndarray:
    """Dense P such that P @ A applies the recorded swaps to A's rows."""
    P = np.eye(n, dtype=dtype, order="F")
    return as_matrix(apply_pivots(pivots, P))


def permutation_sign(pivots: np.ndarray) -> int:
    """Sign of the permutation encoded by the swap sequence."""
    sign = 1
    for k, p in enumerate(pivots):
        if p != k:
            sign = -sign
    return sign


# ---------------------------------------------------------------------------
# Factorization containers
# ---------------------------------------------------------------------------

@dataclass
class LuFactors:
    """Packed LU with partial pivoting: U in the upper triangle, strict lower
    part of unit-lower L below it, plus the pivot swap sequence."""

    packed: np.ndarray
    pivots: np.ndarray
    singular: bool = False

    @property
    def n(self) -> int:
        return self.packed.shape[0]

    def lower(self) -> np.ndarray:
        L = np.tril(self.packed, -1)
        np.fill_diagonal(L, 1.0)
        return as_matrix(L)

    def upper(self) -> np.ndarray:
        return as_matrix(np.triu(self.packed))


@dataclass
class CholeskyFactor:
    """Lower-triangular L with A = L @ L.T (upper triangle stored as zero)."""

    l: np.ndarray

    @property
    def n(self) -> int:
        return self.l.shape[0]


# ---------------------------------------------------------------------------
# Solver configuration and reporting
# ---------------------------------------------------------------------------

@dataclass
class SolverConfig:
    tolerance: float = 1e-4
    max_iterations: int | None = None  # None -> solver default of 10 * n
    restart_m: int = 35
    block_size_b: int = 64
    orthogonalization: str = "modified"  # or "classical"

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.restart_m < 1:
            raise ValueError("restart_m must be >= 1")
        if self.block_size_b < 1:
            raise ValueError("block_size_b must be >= 1")
        if self.orthogonalization not in ("classical", "modified"):
            raise ValueError("orthogonalization must be 'classical' or 'modified'")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    def iteration_cap(self, n: int) -> int:
        return self.max_iterations if self.max_iterations is not None else 10 * n


@dataclass
class SolveReport:
    converged: bool = False
    iterations: int = 0
    final_relative_residual: float = np.inf
    residual_history: list = field(default_factory=list)
    breakdown: str | None = None
    wall_time: float = 0.0
    restart_cycles: list | None = None  # GMRES: inner-iteration index at each cycle start


def relative_residual(A: np.ndarray, x: np.ndarray, b: np.ndarray) -> float:
    """||b - A x||_2 / ||b||_2."""
    check_system(A, x, b)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        raise DegenerateRhsError("||b|| = 0: relative residual undefined (x = 0 is exact)")
    return float(np.linalg.norm(b - A @ x) / bnorm)
