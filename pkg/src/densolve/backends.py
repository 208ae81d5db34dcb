"""BLAS-like compute backends shared by every solver.

Two interchangeable implementations of one operation contract:

* ``ReferenceBackend`` -- plain sequential evaluation; matrix-matrix products
  are swept column by column (level-2 style).
* ``BlockedBackend`` -- matrix-matrix products are tiled over the output and
  evaluated per tile, optionally on a thread pool (level-3 style).

Every call increments exactly one call counter and accrues the conventional
flop count for its shape, so solver cost laws can be checked from counters.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .core import DimensionError, check_precision

_COUNTED_OPS = ("axpy", "dot", "nrm2", "scal", "gemv", "ger", "gemm", "trsm", "iamax")

# flops below which the blocked backend does not bother with threads
_PARALLEL_FLOP_CUTOFF = 1 << 24


@dataclass
class BackendCounters:
    axpy_calls: int = 0
    dot_calls: int = 0
    nrm2_calls: int = 0
    scal_calls: int = 0
    gemv_calls: int = 0
    ger_calls: int = 0
    gemm_calls: int = 0
    trsm_calls: int = 0
    iamax_calls: int = 0

    axpy_flops: float = 0.0
    dot_flops: float = 0.0
    nrm2_flops: float = 0.0
    scal_flops: float = 0.0
    gemv_flops: float = 0.0
    ger_flops: float = 0.0
    gemm_flops: float = 0.0
    trsm_flops: float = 0.0
    iamax_flops: float = 0.0

    def reset(self):
        for f in fields(self):
            setattr(self, f.name, 0 if f.type == "int" else 0.0)

    def total_calls(self) -> int:
        return sum(getattr(self, f"{op}_calls") for op in _COUNTED_OPS)

    def total_flops(self) -> float:
        return sum(getattr(self, f"{op}_flops") for op in _COUNTED_OPS)

    def snapshot(self) -> "BackendCounters":
        return BackendCounters(**{f.name: getattr(self, f.name) for f in fields(self)})


def _check_vectors(*vs):
    lens = {v.shape[0] for v in vs}
    if len(lens) != 1:
        raise DimensionError(f"vector lengths differ: {sorted(lens)}")
    for v in vs:
        if v.ndim != 1:
            raise DimensionError(f"expected 1-d vector, got ndim={v.ndim}")
    check_precision(*vs)


class Backend:
    """Operation contract shared by all backends.

    Level-1/2 operations are common; subclasses choose the gemm strategy.
    A backend instance must be used by one solve at a time (the counters are
    per-instance state).
    """

    name = "abstract"

    def __init__(self):
        self.counters = BackendCounters()

    def _tally(self, op: str, flops: float):
        c = self.counters
        setattr(c, f"{op}_calls", getattr(c, f"{op}_calls") + 1)
        setattr(c, f"{op}_flops", getattr(c, f"{op}_flops") + flops)

    # -- staging hook (host<->device seam; no-op for in-memory backends) ----

    def stage_in(self, *arrays):
        return arrays if len(arrays) != 1 else arrays[0]

    def stage_out(self, *arrays):
        return arrays if len(arrays) != 1 else arrays[0]

    # -- level 1 ------------------------------------------------------------

    def axpy(self, alpha: float, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        _check_vectors(x, y)
        self._tally("axpy", 2 * x.shape[0])
        return y + alpha * x

    def dot(self, x: np.ndarray, y: np.ndarray) -> float:
        _check_vectors(x, y)
        self._tally("dot", 2 * x.shape[0])
        return float(np.dot(x, y))

    def nrm2(self, x: np.ndarray) -> float:
        self._tally("nrm2", 2 * x.shape[0])
        if x.shape[0] == 0:
            return 0.0
        m = float(np.max(np.abs(x)))
        if m == 0.0 or not np.isfinite(m):
            return m
        # scaled two-pass form: overflow-safe for entries near the dtype max
        return m * float(np.sqrt(np.dot(x / m, x / m)))

    def scal(self, alpha: float, x: np.ndarray) -> np.ndarray:
        self._tally("scal", x.shape[0])
        return alpha * x

    def iamax(self, x: np.ndarray) -> int:
        if x.shape[0] == 0:
            raise DimensionError("iamax of empty vector")
        self._tally("iamax", 0)
        return int(np.argmax(np.abs(x)))  # argmax takes the first maximum: ties break low

    # -- level 2 ------------------------------------------------------------

    def gemv(self, A: np.ndarray, x: np.ndarray) -> np.ndarray:
        if A.ndim != 2 or x.ndim != 1 or A.shape[1] != x.shape[0]:
            raise DimensionError(f"gemv shapes {A.shape} x {x.shape}")
        check_precision(A, x)
        m, n = A.shape
        self._tally("gemv", 2 * m * n)
        return A @ x

    def ger(self, A: np.ndarray, alpha: float, x: np.ndarray, y: np.ndarray,
            out: np.ndarray | None = None) -> np.ndarray:
        m, n = A.shape
        if x.shape != (m,) or y.shape != (n,):
            raise DimensionError(f"ger shapes {A.shape}, x {x.shape}, y {y.shape}")
        check_precision(A, x, y)
        self._tally("ger", 2 * m * n)
        if out is None:
            return A + alpha * np.outer(x, y)
        if out is not A:
            np.copyto(out, A)
        out += alpha * np.outer(x, y)
        return out

    # -- level 3 ------------------------------------------------------------

    def gemm(self, alpha: float, A: np.ndarray, B: np.ndarray, beta: float,
             C: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        """alpha * A @ B + beta * C.  ``out`` may alias C, never A or B."""
        raise NotImplementedError

    def _check_gemm(self, A, B, C):
        if A.ndim != 2 or B.ndim != 2 or C.ndim != 2:
            raise DimensionError("gemm operands must be 2-d")
        m, k = A.shape
        k2, n = B.shape
        if k != k2 or C.shape != (m, n):
            raise DimensionError(f"gemm shapes {A.shape} @ {B.shape} -> {C.shape}")
        check_precision(A, B, C)
        self._tally("gemm", 2 * m * n * k)
        return m, n, k

    def trsm_lower_unit(self, L: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Solve L Z = B with L unit-lower-triangular (stored diagonal ignored)."""
        b = L.shape[0]
        if L.shape != (b, b) or B.ndim != 2 or B.shape[0] != b:
            raise DimensionError(f"trsm shapes {L.shape}, {B.shape}")
        check_precision(L, B)
        self._tally("trsm", b * (b - 1) * B.shape[1])
        Z = np.array(B, order="F", copy=True)
        for i in range(1, b):
            Z[i, :] -= L[i, :i] @ Z[:i, :]
        return Z

    def trsm_upper(self, U: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Solve U Z = B with U upper-triangular (non-unit diagonal)."""
        b = U.shape[0]
        if U.shape != (b, b) or B.ndim != 2 or B.shape[0] != b:
            raise DimensionError(f"trsm shapes {U.shape}, {B.shape}")
        check_precision(U, B)
        self._tally("trsm", b * b * B.shape[1])
        Z = np.array(B, order="F", copy=True)
        for i in range(b - 1, -1, -1):
            if i + 1 < b:
                Z[i, :] -= U[i, i + 1:] @ Z[i + 1:, :]
            Z[i, :] /= U[i, i]
        return Z


class ReferenceBackend(Backend):
    """Strictly sequential baseline: gemm is a column-by-column matvec sweep."""

    name = "reference"

    def gemm(self, alpha, A, B, beta, C, out=None):
        m, n, k = self._check_gemm(A, B, C)
        if out is None:
            out = np.empty((m, n), dtype=C.dtype, order="F")
        for j in range(n):
            out[:, j] = beta * C[:, j] + alpha * (A @ B[:, j])
        return out


class BlockedBackend(Backend):
    """Tiled gemm over output blocks, optionally evaluated on a thread pool.

    Each output tile is produced by exactly one task with a fixed inner
    evaluation, so results are bitwise-reproducible for a given configuration
    regardless of scheduling.
    """

    name = "blocked"

    def __init__(self, tile: int = 64, threads: int | None = None):
        super().__init__()
        if tile < 1:
            raise ValueError("tile must be >= 1")
        self.tile = tile
        self.threads = threads if threads is not None else (os.cpu_count() or 1)

    def gemm(self, alpha, A, B, beta, C, out=None):
        m, n, k = self._check_gemm(A, B, C)
        if out is None:
            out = np.empty((m, n), dtype=C.dtype, order="F")
        t = self.tile
        tiles = [(i, min(i + t, m), j, min(j + t, n))
                 for j in range(0, n, t) for i in range(0, m, t)]

        def run(tile):
            i0, i1, j0, j1 = tile
            out[i0:i1, j0:j1] = beta * C[i0:i1, j0:j1] + alpha * np.dot(A[i0:i1, :], B[:, j0:j1])

        if self.threads > 1 and len(tiles) > 1 and 2 * m * n * k >= _PARALLEL_FLOP_CUTOFF:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                list(pool.map(run, tiles))
        else:
            for tile in tiles:
                run(tile)
        return out


BACKEND_NAMES = ("reference", "blocked")


def get_backend(name: str, **kwargs) -> Backend:
    """Construct a backend by name ('reference' or 'blocked')."""
    if name == "reference":
        return ReferenceBackend()
    if name == "blocked":
        return BlockedBackend(**kwargs)
    raise ValueError(f"unknown backend {name!r}; expected one of {BACKEND_NAMES}")
