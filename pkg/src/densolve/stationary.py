"""Stationary iterations: Jacobi and Gauss-Seidel."""

from __future__ import annotations

import time

import numpy as np

from .backends import Backend
from .core import (
    DegenerateRhsError,
    SingularMatrixError,
    SolveReport,
    SolverConfig,
    check_system,
)
from .direct import forward_substitution


def _start(A, b, x0, backend):
    n = check_system(A, b, x0)
    if np.any(np.diag(A) == 0.0):
        raise SingularMatrixError("zero diagonal entry: stationary sweep undefined")
    bnorm = backend.nrm2(b)
    if bnorm == 0.0:
        raise DegenerateRhsError("||b|| = 0")
    return n, bnorm


def jacobi_solve(A: np.ndarray, b: np.ndarray, x0: np.ndarray,
                 cfg: SolverConfig, backend: Backend) -> tuple[np.ndarray, SolveReport]:
    """Jacobi iteration x <- x + D^-1 (b - A x), one matvec per iteration."""
    t0 = time.perf_counter()
    n, bnorm = _start(A, b, x0, backend)
    d = np.diag(A).copy()
    x = x0.copy()
    r = backend.axpy(-1.0, backend.gemv(A, x), b)
    res = backend.nrm2(r) / bnorm
    history = [res]
    report = SolveReport(residual_history=history)
    it = 0
    while res > cfg.tolerance and it < cfg.iteration_cap(n):
        x = x + r / d
        r = backend.axpy(-1.0, backend.gemv(A, x), b)
        res = backend.nrm2(r) / bnorm
        history.append(res)
        it += 1
    report.converged = res <= cfg.tolerance
    report.iterations = it
    report.final_relative_residual = float(res)
    report.wall_time = time.perf_counter() - t0
    return x, report


def gauss_seidel_solve(A: np.ndarray, b: np.ndarray, x0: np.ndarray,
                       cfg: SolverConfig, backend: Backend) -> tuple[np.ndarray, SolveReport]:
    """Gauss-Seidel forward sweep: (D + L) x_new = b - U x_old."""
    t0 = time.perf_counter()
    n, bnorm = _start(A, b, x0, backend)
    lower = np.asfortranarray(np.tril(A))
    strict_upper = np.asfortranarray(np.triu(A, 1))
    x = x0.copy()
    r = backend.axpy(-1.0, backend.gemv(A, x), b)
    res = backend.nrm2(r) / bnorm
    history = [res]
    report = SolveReport(residual_history=history)
    it = 0
    while res > cfg.tolerance and it < cfg.iteration_cap(n):
        rhs = backend.axpy(-1.0, backend.gemv(strict_upper, x), b)
        x = forward_substitution(lower, rhs, unit_diagonal=False)
        r = backend.axpy(-1.0, backend.gemv(A, x), b)
        res = backend.nrm2(r) / bnorm
        history.append(res)
        it += 1
    report.converged = res <= cfg.tolerance
    report.iterations = it
    report.final_relative_residual = float(res)
    report.wall_time = time.perf_counter() - t0
    return x, report
