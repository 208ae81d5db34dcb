"""Benchmark and experiment driver: problem generators, Matrix Market
ingestion, method x size x precision x backend sweeps, and table emitters.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

import numpy as np

from . import direct, krylov, stationary
from .backends import get_backend
from .core import LinAlgError, SolveReport, SolverConfig, relative_residual

PRECISION_DTYPES = {"f32": np.float32, "f64": np.float64}

PROBLEM_KINDS = ("identity", "diag_dominant", "spd", "general_nonsymmetric", "from_file")

ITERATIVE_METHODS = ("jacobi", "gauss-seidel", "cg", "gmres", "bicgstab")
DIRECT_METHODS = ("lu", "lu-blocked", "cholesky")
ALL_METHODS = ITERATIVE_METHODS + DIRECT_METHODS

# problem family satisfying each method's convergence preconditions
METHOD_FAMILY = {
    "jacobi": "diag_dominant",
    "gauss-seidel": "diag_dominant",
    "cg": "spd",
    "gmres": "general_nonsymmetric",
    "bicgstab": "general_nonsymmetric",
    "lu": "general_nonsymmetric",
    "lu-blocked": "general_nonsymmetric",
    "cholesky": "spd",
}

CSV_HEADER = "method,n,precision,backend,wall_time_s,iterations,converged,relative_residual,speedup"


@dataclass(frozen=True)
class ProblemSpec:
    kind: str
    n: int
    seed: int = 0
    precision: str = "f64"

    def __post_init__(self):
        if self.kind not in PROBLEM_KINDS:
            raise ValueError(f"unknown problem kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.precision not in PRECISION_DTYPES:
            raise ValueError(f"precision must be one of {sorted(PRECISION_DTYPES)}")


@dataclass
class BenchRecord:
    method: str
    n: int
    precision: str
    backend: str
    wall_time: float
    iterations: int
    converged: bool
    relative_residual: float
    speedup_vs_reference: float


_KIND_CODE = {k: i for i, k in enumerate(PROBLEM_KINDS)}


def _rng(spec: ProblemSpec):
    return np.random.default_rng([spec.seed, spec.n, _KIND_CODE[spec.kind]])


def generate_problem(spec: ProblemSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic (A, b, x_true) with b = A @ x_true in the target precision."""
    dtype = PRECISION_DTYPES[spec.precision]
    n = spec.n
    rng = _rng(spec)
    if spec.kind == "identity":
        A = np.eye(n)
    elif spec.kind == "diag_dominant":
        A = rng.uniform(-1.0, 1.0, size=(n, n))
        np.fill_diagonal(A, 0.0)
        np.fill_diagonal(A, 4.0 * np.sum(np.abs(A), axis=1))
    elif spec.kind == "spd":
        M = rng.uniform(-1.0, 1.0, size=(n, n))
        A = M.T @ M + n * np.eye(n)
        A = np.tril(A) + np.tril(A, -1).T  # exactly symmetric
    elif spec.kind == "general_nonsymmetric":
        E = rng.uniform(-1.0, 1.0, size=(n, n))
        np.fill_diagonal(E, 0.0)
        R = rng.uniform(-1.0, 1.0, size=(n, n))
        A = E + 0.5 * (R - R.T)
        np.fill_diagonal(A, 0.0)
        np.fill_diagonal(A, 4.0 * np.sum(np.abs(A), axis=1))
    else:
        raise ValueError(f"cannot generate kind {spec.kind!r}")
    x_true = rng.uniform(-1.0, 1.0, size=n)
    A = np.asfortranarray(A, dtype=dtype)
    x_true = x_true.astype(dtype)
    b = A @ x_true
    return A, b, x_true


def generate_matrix(spec: ProblemSpec) -> tuple[np.ndarray, np.ndarray]:
    """The (A, b) pair of generate_problem."""
    A, b, _ = generate_problem(spec)
    return A, b


def generate_well_separated(n: int, seed: int = 0, dtype=np.float64) -> np.ndarray:
    """Matrix whose column entries have pairwise relative |.| separation >= 2e-3,
    so blocked and unblocked LU pick identical pivot rows."""
    rng = np.random.default_rng([seed, n, 97])
    A = np.empty((n, n), order="F")
    for j in range(n):
        mags = 1.002 ** rng.permutation(n)
        signs = rng.choice([-1.0, 1.0], size=n)
        A[:, j] = signs * mags
    return np.asfortranarray(A, dtype=dtype)


# ---------------------------------------------------------------------------
# Matrix Market ingestion
# ---------------------------------------------------------------------------

class MatrixMarketError(ValueError):
    """Malformed Matrix Market input; carries the offending line number."""

    def __init__(self, msg, line):
        super().__init__(f"line {line}: {msg}")
        self.line = line


def read_matrix_market(path) -> np.ndarray:
    """Read a dense matrix from a Matrix Market file.

    Supports 'array' and 'coordinate' formats, field 'real', symmetry
    'general' or 'symmetric' (mirrored on read).  Indices in the file are
    1-based; unlisted coordinate entries are zero.
    """
    with open(path) as fh:
        lines = fh.readlines()
    if not lines:
        raise MatrixMarketError("empty file", 1)
    header = lines[0].split()
    if len(header) != 5 or header[0] != "%%MatrixMarket" or header[1] != "matrix":
        raise MatrixMarketError(f"malformed header {lines[0].strip()!r}", 1)
    fmt, field, symmetry = header[2].lower(), header[3].lower(), header[4].lower()
    if fmt not in ("array", "coordinate"):
        raise MatrixMarketError(f"unsupported format {fmt!r}", 1)
    if field != "real":
        raise MatrixMarketError(f"unsupported field {field!r} (only 'real')", 1)
    if symmetry not in ("general", "symmetric"):
        raise MatrixMarketError(f"unsupported symmetry {symmetry!r}", 1)

    body = [(i + 1, ln.strip()) for i, ln in enumerate(lines[1:], start=1)
            if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise MatrixMarketError("missing size line", len(lines))

    lineno, size_line = body[0]
    parts = size_line.split()
    try:
        if fmt == "array":
            if len(parts) != 2:
                raise ValueError
            rows, cols = int(parts[0]), int(parts[1])
            nnz = None
        else:
            if len(parts) != 3:
                raise ValueError
            rows, cols, nnz = int(parts[0]), int(parts[1]), int(parts[2])
    except ValueError:
        raise MatrixMarketError(f"bad size line {size_line!r}", lineno) from None

    A = np.zeros((rows, cols), order="F")
    entries = body[1:]
    if fmt == "array":
        expected = rows * cols if symmetry == "general" else sum(range(1, cols + 1)) + (rows - cols) * cols
        if symmetry == "symmetric":
            # lower triangle, column by column
            expected = sum(rows - j for j in range(cols))
        if len(entries) != expected:
            raise MatrixMarketError(f"expected {expected} values, found {len(entries)}",
                                    entries[-1][0] if entries else lineno)
        idx = 0
        for j in range(cols):
            start = j if symmetry == "symmetric" else 0
            for i in range(start, rows):
                ln, text = entries[idx]
                try:
                    val = float(text.split()[0])
                except ValueError:
                    raise MatrixMarketError(f"bad value {text!r}", ln) from None
                A[i, j] = val
                if symmetry == "symmetric" and i != j:
                    A[j, i] = val
                idx += 1
    else:
        if len(entries) != nnz:
            raise MatrixMarketError(f"expected {nnz} entries, found {len(entries)}",
                                    entries[-1][0] if entries else lineno)
        for ln, text in entries:
            parts = text.split()
            if len(parts) != 3:
                raise MatrixMarketError(f"expected 'i j value', got {text!r}", ln)
            try:
                i, j, val = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError:
                raise MatrixMarketError(f"bad entry {text!r}", ln) from None
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise MatrixMarketError(f"index ({i}, {j}) out of range for {rows}x{cols}", ln)
            A[i - 1, j - 1] = val
            if symmetry == "symmetric" and i != j:
                A[j - 1, i - 1] = val
    return A


# ---------------------------------------------------------------------------
# Solve dispatch
# ---------------------------------------------------------------------------

def solve_system(method: str, A: np.ndarray, b: np.ndarray, x0: np.ndarray | None,
                 cfg: SolverConfig, backend) -> tuple[np.ndarray, SolveReport]:
    """Run one named method; direct methods return a zero-iteration report."""
    if x0 is None:
        x0 = np.zeros_like(b)
    if method == "jacobi":
        return stationary.jacobi_solve(A, b, x0, cfg, backend)
    if method == "gauss-seidel":
        return stationary.gauss_seidel_solve(A, b, x0, cfg, backend)
    if method == "cg":
        return krylov.cg_solve(A, b, x0, cfg, backend)
    if method == "gmres":
        return krylov.gmres_solve(A, b, x0, cfg, backend)
    if method == "bicgstab":
        return krylov.bicgstab_solve(A, b, x0, cfg, backend)
    t0 = time.perf_counter()
    if method == "lu":
        x = direct.lu_solve(direct.lu_factor_unblocked(A, backend), b)
    elif method == "lu-blocked":
        x = direct.lu_solve(direct.lu_factor_blocked(A, cfg.block_size_b, backend), b)
    elif method == "cholesky":
        x = direct.cholesky_solve(direct.cholesky_factor(A, cfg.block_size_b, backend), b)
    else:
        raise ValueError(f"unknown method {method!r}")
    res = relative_residual(A, x, b)
    report = SolveReport(converged=True, iterations=0, final_relative_residual=res,
                         residual_history=[res], wall_time=time.perf_counter() - t0)
    return x, report


# ---------------------------------------------------------------------------
# Benchmark sweep
# ---------------------------------------------------------------------------

def run_benchmark(methods, sizes, precisions, backends, cfg: SolverConfig,
                  seed: int = 0, repeats: int = 3) -> list[BenchRecord]:
    """Run each (method, n, precision) on every backend: one warm-up run, then
    best-of-`repeats` timing, with speedup relative to the first backend."""
    if not (methods and sizes and precisions and backends):
        raise ValueError("methods, sizes, precisions and backends must be non-empty")
    records = []
    for method in methods:
        if method not in ALL_METHODS:
            raise ValueError(f"unknown method {method!r}")
        for n in sizes:
            for precision in precisions:
                spec = ProblemSpec(kind=METHOD_FAMILY[method], n=n, seed=seed,
                                   precision=precision)
                A, b, _ = generate_problem(spec)
                baseline_time = None
                for backend_name in backends:
                    solve = lambda: solve_system(method, A, b, None, cfg,
                                                 get_backend(backend_name))
                    try:
                        x, report = solve()  # warm-up, result kept for the record
                    except LinAlgError:
                        # a failed solve is recorded, never aborts the sweep
                        records.append(BenchRecord(
                            method=method, n=n, precision=precision,
                            backend=backend_name, wall_time=np.nan, iterations=0,
                            converged=False, relative_residual=np.nan,
                            speedup_vs_reference=np.nan))
                        continue
                    best = np.inf
                    for _ in range(repeats):
                        t0 = time.perf_counter()
                        solve()
                        best = min(best, time.perf_counter() - t0)
                    if baseline_time is None:
                        baseline_time = best
                    records.append(BenchRecord(
                        method=method, n=n, precision=precision, backend=backend_name,
                        wall_time=best, iterations=report.iterations,
                        converged=report.converged,
                        relative_residual=report.final_relative_residual,
                        speedup_vs_reference=baseline_time / best))
    return records


# ---------------------------------------------------------------------------
# Report emitters
# ---------------------------------------------------------------------------

def emit_report(records, format: str = "csv") -> str:
    if not records:
        raise ValueError("empty record list: nothing to report")
    if format == "csv":
        return _emit_csv(records)
    if format == "markdown":
        return _emit_markdown(records)
    raise ValueError(f"unknown report format {format!r}")


def _emit_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER.split(","))
    for r in records:
        w.writerow([r.method, r.n, r.precision, r.backend, repr(r.wall_time),
                    r.iterations, r.converged, repr(r.relative_residual),
                    repr(r.speedup_vs_reference)])
    return buf.getvalue()


def parse_report_csv(text: str) -> list[BenchRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CSV_HEADER.split(","):
        raise ValueError("bad csv report header")
    out = []
    for row in rows[1:]:
        out.append(BenchRecord(method=row[0], n=int(row[1]), precision=row[2],
                               backend=row[3], wall_time=float(row[4]),
                               iterations=int(row[5]), converged=row[6] == "True",
                               relative_residual=float(row[7]),
                               speedup_vs_reference=float(row[8])))
    return out


def _family_of(method: str) -> str:
    return "iterative" if method in ITERATIVE_METHODS else "direct"


def _emit_markdown(records) -> str:
    """Speedup grids mirroring the paper-style table shape: one table per
    (precision, method family), sizes down the rows, methods across."""
    out = []
    groups: dict[tuple[str, str], list[BenchRecord]] = {}
    for r in records:
        groups.setdefault((r.precision, _family_of(r.method)), []).append(r)
    for (precision, family), recs in groups.items():
        methods = sorted({r.method for r in recs}, key=lambda m: ALL_METHODS.index(m))
        sizes = sorted({r.n for r in recs})
        out.append(f"### {family.capitalize()} methods, {precision} — speedup vs reference backend")
        out.append("")
        out.append("| Matrix dimension | " + " | ".join(methods) + " |")
        out.append("|---" * (len(methods) + 1) + "|")
        for n in sizes:
            cells = []
            for m in methods:
                sub = [r for r in recs if r.method == m and r.n == n]
                # show the measured (non-baseline) backend when more than one ran
                pick = sub[-1] if sub else None
                cells.append(f"{pick.speedup_vs_reference:.2f}" if pick else "-")
            out.append(f"| {n} | " + " | ".join(cells) + " |")
        out.append("")
    return "\n".join(out)
