"""Direct solvers: right-looking LU with partial pivoting (unblocked and
blocked with delayed updating), blocked Cholesky, and triangular substitution.
"""

from __future__ import annotations

import warnings

import numpy as np

from .backends import Backend
from .core import (
    CholeskyFactor,
    DimensionError,
    LuFactors,
    NotSpdError,
    SingularMatrixError,
    apply_pivots,
    check_square,
    check_precision,
    unit_roundoff,
)


def lu_factor_unblocked(A: np.ndarray, backend: Backend) -> LuFactors:
    """Right-looking LU with partial pivoting: pivot search, full-row swap,
    column scale, rank-1 trailing update per column."""
    n = check_square(A)
    check_precision(A)
    W = np.array(A, order="F", copy=True)
    piv = np.empty(n, dtype=np.intp)
    singular = False
    for k in range(n):
        v = k + backend.iamax(W[k:, k])
        piv[k] = v
        if v != k:
            W[[k, v], :] = W[[v, k], :]
        akk = W[k, k]
        if akk == 0.0:
            # elimination skipped for this column; factors become singular
            singular = True
            continue
        if k + 1 < n:
            W[k + 1:, k] = backend.scal(1.0 / akk, W[k + 1:, k])
            backend.ger(W[k + 1:, k + 1:], -1.0, W[k + 1:, k], W[k, k + 1:],
                        out=W[k + 1:, k + 1:])
    return LuFactors(packed=W, pivots=piv, singular=singular)


def lu_factor_blocked(A: np.ndarray, b: int, backend: Backend) -> LuFactors:
    """Blocked right-looking LU: per panel of width <= b, a BLAS-2 panel
    factorization, full-width row swaps, a triangular solve for the block row
    of U, and one rank-b gemm update of the trailing submatrix."""
    n = check_square(A)
    check_precision(A)
    if b < 1:
        raise ValueError("block size must be >= 1")
    if b > n:
        warnings.warn(f"block size {b} exceeds n={n}; clamping to n")
        b = n
    W = np.array(A, order="F", copy=True)
    piv = np.empty(n, dtype=np.intp)
    singular = False
    for kb in range(0, n, b):
        bf = min(kb + b, n)  # one past the panel's last column
        for i in range(kb, bf):
            v = i + backend.iamax(W[i:, i])
            piv[i] = v
            if v != i:
                W[[i, v], :] = W[[v, i], :]
            aii = W[i, i]
            if aii == 0.0:
                singular = True
                continue
            if i + 1 < n:
                W[i + 1:, i] = backend.scal(1.0 / aii, W[i + 1:, i])
                if i + 1 < bf:
                    backend.ger(W[i + 1:, i + 1:bf], -1.0, W[i + 1:, i],
                                W[i, i + 1:bf], out=W[i + 1:, i + 1:bf])
        if bf < n:
            W[kb:bf, bf:] = backend.trsm_lower_unit(W[kb:bf, kb:bf], W[kb:bf, bf:])
            backend.gemm(-1.0, W[bf:, kb:bf], W[kb:bf, bf:], 1.0, W[bf:, bf:],
                         out=W[bf:, bf:])
    return LuFactors(packed=W, pivots=piv, singular=singular)


def cholesky_factor(A: np.ndarray, b: int, backend: Backend) -> CholeskyFactor:
    """Blocked right-looking Cholesky of a symmetric positive definite matrix.

    Panel columns are factored to full height (scale + rank-1 panel updates),
    then the trailing submatrix receives one symmetric gemm update; the
    structure mirrors the blocked LU without pivoting.
    """
    n = check_square(A)
    check_precision(A)
    if b < 1:
        raise ValueError("block size must be >= 1")
    b = min(b, n)
    u = unit_roundoff(A.dtype)
    amax = float(np.max(np.abs(A))) if n else 0.0
    if float(np.max(np.abs(A - A.T))) > 10.0 * u * amax:
        raise NotSpdError("matrix is not symmetric")
    W = np.array(A, order="F", copy=True)
    for kb in range(0, n, b):
        bf = min(kb + b, n)
        for i in range(kb, bf):
            aii = W[i, i]
            if not (aii > 0.0) or not np.isfinite(aii):
                raise NotSpdError(f"nonpositive pivot {aii} at index {i}", index=i)
            W[i, i] = np.sqrt(aii)
            if i + 1 < n:
                W[i + 1:, i] = backend.scal(1.0 / W[i, i], W[i + 1:, i])
                if i + 1 < bf:
                    backend.ger(W[i + 1:, i + 1:bf], -1.0, W[i + 1:, i],
                                W[i + 1:bf, i], out=W[i + 1:, i + 1:bf])
        if bf < n:
            L10 = W[bf:, kb:bf]
            backend.gemm(-1.0, L10, np.asfortranarray(L10.T), 1.0, W[bf:, bf:],
                         out=W[bf:, bf:])
    return CholeskyFactor(l=np.asfortranarray(np.tril(W)))


def forward_substitution(L: np.ndarray, b: np.ndarray, unit_diagonal: bool = False) -> np.ndarray:
    """Solve L y = b by forward sweep over the lower triangle of L."""
    n = check_square(L)
    if b.shape != (n,):
        raise DimensionError(f"rhs shape {b.shape} does not conform to {n}x{n}")
    check_precision(L, b)
    y = b.copy()
    for i in range(n):
        y[i] -= L[i, :i] @ y[:i]
        if not unit_diagonal:
            if L[i, i] == 0.0:
                raise SingularMatrixError(f"zero diagonal at row {i}")
            y[i] /= L[i, i]
    return y


def backward_substitution(U: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Solve U x = y by backward sweep over the upper triangle of U."""
    n = check_square(U)
    if y.shape != (n,):
        raise DimensionError(f"rhs shape {y.shape} does not conform to {n}x{n}")
    check_precision(U, y)
    x = y.copy()
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            x[i] -= U[i, i + 1:] @ x[i + 1:]
        if U[i, i] == 0.0:
            raise SingularMatrixError(f"zero diagonal at row {i}")
        x[i] /= U[i, i]
    return x


def lu_solve(f: LuFactors, b: np.ndarray) -> np.ndarray:
    """Two-step solve from packed LU factors: permute b, then L y = Pb and U x = y."""
    if f.singular:
        raise SingularMatrixError("LU factors are flagged singular")
    if b.shape != (f.n,):
        raise DimensionError(f"rhs shape {b.shape} does not conform to n={f.n}")
    pb = apply_pivots(f.pivots, b)
    y = forward_substitution(f.packed, pb, unit_diagonal=True)
    return backward_substitution(f.packed, y)


def cholesky_solve(f: CholeskyFactor, b: np.ndarray) -> np.ndarray:
    """Solve L y = b then L^T x = y from a Cholesky factor."""
    if b.shape != (f.n,):
        raise DimensionError(f"rhs shape {b.shape} does not conform to n={f.n}")
    y = forward_substitution(f.l, b, unit_diagonal=False)
    return backward_substitution(np.asfortranarray(f.l.T), y)
