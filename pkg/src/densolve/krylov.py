"""Krylov solvers: conjugate gradients, restarted GMRES, BiCGSTAB.

GMRES builds the Arnoldi relation with Gram-Schmidt (modified by default,
classical available via SolverConfig.orthogonalization) and completes the
least-squares step incrementally with Givens rotations.  BiCGSTAB carries the
full recurrence set including the residual update r <- s - omega t and the
rho advance each iteration.
"""

from __future__ import annotations

import time

import numpy as np

from .backends import Backend
from .core import (
    DegenerateRhsError,
    NotSpdError,
    SolveReport,
    SolverConfig,
    check_system,
    relative_residual,
    unit_roundoff,
)
from .direct import backward_substitution


def _rhs_norm(b, backend):
    bnorm = backend.nrm2(b)
    if bnorm == 0.0:
        raise DegenerateRhsError("||b|| = 0")
    return bnorm


def cg_solve(A: np.ndarray, b: np.ndarray, x0: np.ndarray,
             cfg: SolverConfig, backend: Backend) -> tuple[np.ndarray, SolveReport]:
    """Conjugate gradients for SPD systems; one matvec per iteration."""
    t0 = time.perf_counter()
    n = check_system(A, b, x0)
    u = unit_roundoff(A.dtype)
    amax = float(np.max(np.abs(A)))
    if float(np.max(np.abs(A - A.T))) > 10.0 * u * amax:
        raise NotSpdError("matrix is not symmetric")
    bnorm = _rhs_norm(b, backend)
    x = x0.copy()
    r = backend.axpy(-1.0, backend.gemv(A, x), b)
    res = backend.nrm2(r) / bnorm
    history = [res]
    report = SolveReport(residual_history=history)
    p = r.copy()
    rs = backend.dot(r, r)
    it = 0
    while res > cfg.tolerance and it < cfg.iteration_cap(n):
        Ap = backend.gemv(A, p)
        pAp = backend.dot(p, Ap)
        if pAp <= 0.0:
            raise NotSpdError(f"p'Ap = {pAp} <= 0: matrix is not positive definite")
        alpha = rs / pAp
        x = backend.axpy(alpha, p, x)
        r = backend.axpy(-alpha, Ap, r)
        rs_new = backend.dot(r, r)
        p = backend.axpy(rs_new / rs, p, r)
        rs = rs_new
        res = backend.nrm2(r) / bnorm
        history.append(res)
        it += 1
    report.converged = res <= cfg.tolerance
    report.iterations = it
    report.final_relative_residual = float(res)
    report.wall_time = time.perf_counter() - t0
    return x, report


def gmres_solve(A: np.ndarray, b: np.ndarray, x0: np.ndarray,
                cfg: SolverConfig, backend: Backend,
                workspace_sink: list | None = None) -> tuple[np.ndarray, SolveReport]:
    """Restarted GMRES(m) with Gram-Schmidt Arnoldi and Givens least squares.

    ``workspace_sink``, if given, receives one dict per restart cycle with the
    basis V, Hessenberg H (pre-rotation), inner-step count, and beta.
    """
    t0 = time.perf_counter()
    n = check_system(A, b, x0)
    m = cfg.restart_m
    u = unit_roundoff(A.dtype)
    bnorm = _rhs_norm(b, backend)
    x = x0.copy()
    cap = cfg.iteration_cap(n)
    total_it = 0
    history: list[float] = []
    cycles: list[int] = []
    report = SolveReport(residual_history=history, restart_cycles=cycles)

    def finish(converged, breakdown=None):
        report.converged = converged
        report.iterations = total_it
        report.final_relative_residual = history[-1]
        report.breakdown = breakdown
        report.wall_time = time.perf_counter() - t0
        return x, report

    while True:
        r = backend.axpy(-1.0, backend.gemv(A, x), b)
        beta = backend.nrm2(r)
        relres = beta / bnorm
        if total_it == 0:
            history.append(relres)
        if relres <= cfg.tolerance:
            return finish(True)
        if total_it >= cap:
            return finish(False)
        cycles.append(total_it)
        cycle_start_res = relres

        V = np.zeros((n, m + 1), dtype=A.dtype, order="F")
        H = np.zeros((m + 1, m), dtype=A.dtype, order="F")
        Hraw = np.zeros((m + 1, m), dtype=A.dtype, order="F")
        g = np.zeros(m + 1, dtype=A.dtype)
        cs = np.zeros(m, dtype=A.dtype)
        sn = np.zeros(m, dtype=A.dtype)
        g[0] = beta
        V[:, 0] = backend.scal(1.0 / beta, r)

        inner = 0
        happy = False
        for k in range(m):
            w = backend.gemv(A, V[:, k])
            if cfg.orthogonalization == "modified":
                for j in range(k + 1):
                    h = backend.dot(V[:, j], w)
                    w = backend.axpy(-h, V[:, j], w)
                    H[j, k] = h
            else:  # classical Gram-Schmidt, coefficients from the unmodified w
                coeffs = [backend.dot(V[:, j], w) for j in range(k + 1)]
                for j, h in enumerate(coeffs):
                    w = backend.axpy(-h, V[:, j], w)
                    H[j, k] = h
            hk1 = backend.nrm2(w)
            H[k + 1, k] = hk1
            Hraw[:, k] = H[:, k]
            happy = hk1 == 0.0
            if not happy:
                V[:, k + 1] = backend.scal(1.0 / hk1, w)

            # rotate the new column through the accumulated Givens rotations
            for j in range(k):
                t = cs[j] * H[j, k] + sn[j] * H[j + 1, k]
                H[j + 1, k] = -sn[j] * H[j, k] + cs[j] * H[j + 1, k]
                H[j, k] = t
            denom = np.hypot(H[k, k], H[k + 1, k])
            cs[k], sn[k] = H[k, k] / denom, H[k + 1, k] / denom
            H[k, k] = denom
            H[k + 1, k] = 0.0
            g[k + 1] = -sn[k] * g[k]
            g[k] = cs[k] * g[k]

            total_it += 1
            inner = k + 1
            est = abs(float(g[k + 1])) / bnorm
            history.append(est)
            if happy or est <= cfg.tolerance or total_it >= cap:
                break

        # cycle end: solve the rotated triangular system and update x
        y = backward_substitution(np.asfortranarray(H[:inner, :inner]), g[:inner].copy())
        x = backend.axpy(1.0, backend.gemv(V[:, :inner], y), x)
        if workspace_sink is not None:
            workspace_sink.append({"V": V, "H": Hraw, "inner": inner, "beta": beta})

        true_res = relative_residual(A, x, b)
        if happy or history[-1] <= cfg.tolerance or true_res <= cfg.tolerance:
            history[-1] = true_res
            if true_res <= cfg.tolerance or happy:
                return finish(True, breakdown="happy-breakdown" if happy else None)
        if total_it >= cap:
            history[-1] = true_res
            return finish(False)
        # stagnation: no measurable residual reduction across a full cycle
        if inner == m and true_res >= cycle_start_res * (1.0 - u):
            history[-1] = true_res
            return finish(False)


def bicgstab_solve(A: np.ndarray, b: np.ndarray, x0: np.ndarray,
                   cfg: SolverConfig, backend: Backend) -> tuple[np.ndarray, SolveReport]:
    """BiCGSTAB with shadow residual fixed at the initial residual.

    Per full iteration: 6 axpy, 4 dot, 2 matvec.  When ||s|| already meets
    the tolerance the iteration exits early after x <- x + alpha p.
    """
    t0 = time.perf_counter()
    n = check_system(A, b, x0)
    u = unit_roundoff(A.dtype)
    bnorm = _rhs_norm(b, backend)
    x = x0.copy()
    r = backend.axpy(-1.0, backend.gemv(A, x), b)
    r0hat = r.copy()
    r0hat_norm = float(np.linalg.norm(r0hat))
    rho_prev, alpha, omega = 1.0, 1.0, 1.0
    rho = backend.dot(r0hat, r)
    p = np.zeros_like(b)
    v = np.zeros_like(b)
    res = backend.nrm2(r) / bnorm
    history = [res]
    report = SolveReport(residual_history=history)
    rnorm = res * bnorm
    it = 0
    breakdown = None
    while res > cfg.tolerance and it < cfg.iteration_cap(n):
        if abs(rho) < u * r0hat_norm * rnorm:
            breakdown = "rho-breakdown"
            break
        beta = (rho / rho_prev) * (alpha / omega)
        p = backend.axpy(beta, backend.axpy(-omega, v, p), r)
        v = backend.gemv(A, p)
        rv = backend.dot(r0hat, v)
        if rv == 0.0:
            breakdown = "rho-breakdown"
            break
        alpha = rho / rv
        s = backend.axpy(-alpha, v, r)
        snorm = backend.nrm2(s)
        if snorm / bnorm <= cfg.tolerance:
            x = backend.axpy(alpha, p, x)
            r = s
            res = snorm / bnorm
            history.append(res)
            it += 1
            break
        t = backend.gemv(A, s)
        ts = backend.dot(t, s)
        tt = backend.dot(t, t)
        if tt == 0.0:
            breakdown = "omega-breakdown"
            break
        omega = ts / tt
        if abs(omega) < u:
            breakdown = "omega-breakdown"
            break
        x = backend.axpy(omega, s, backend.axpy(alpha, p, x))
        r = backend.axpy(-omega, t, s)
        rho_prev, rho = rho, backend.dot(r0hat, r)
        rnorm = backend.nrm2(r)
        res = rnorm / bnorm
        history.append(res)
        it += 1
    report.converged = res <= cfg.tolerance and breakdown is None
    report.iterations = it
    report.final_relative_residual = float(res)
    report.breakdown = breakdown
    report.wall_time = time.perf_counter() - t0
    return x, report
