"""Command-line interface: single solves and benchmark sweeps.

Exit codes: 0 success, 1 solve failure, 2 usage or input parse error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .backends import BACKEND_NAMES, get_backend
from .core import LinAlgError, SolverConfig
from .harness import (
    ALL_METHODS,
    METHOD_FAMILY,
    MatrixMarketError,
    PRECISION_DTYPES,
    ProblemSpec,
    emit_report,
    generate_problem,
    read_matrix_market,
    run_benchmark,
    solve_system,
)


def _add_common(p):
    p.add_argument("--precision", choices=sorted(PRECISION_DTYPES), default="f64")
    p.add_argument("--backend", choices=BACKEND_NAMES, default="reference")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--restart", type=int, default=35)
    p.add_argument("--block-size", type=int, default=64)
    p.add_argument("--max-iters", type=int, default=None,
                   help="iteration cap (default: 10*n)")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="densolve",
                                 description="Dense linear-system solvers and benchmarks")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve one generated or file-based system")
    sp.add_argument("--method", choices=ALL_METHODS, required=True)
    sp.add_argument("--n", type=int, default=256)
    sp.add_argument("--matrix", metavar="PATH.mtx", default=None,
                    help="read A from a Matrix Market file instead of generating it")
    _add_common(sp)

    bp = sub.add_parser("bench", help="run a method x size x backend sweep")
    bp.add_argument("--method", default="jacobi,gauss-seidel,gmres,bicgstab",
                    help="comma-separated method list")
    bp.add_argument("--sizes", default="256,512,1024",
                    help="comma-separated matrix dimensions")
    bp.add_argument("--output", choices=("csv", "markdown"), default="markdown")
    bp.add_argument("--out", default=None, help="write the report to this path")
    bp.add_argument("--repeats", type=int, default=3)
    _add_common(bp)
    bp.add_argument("--backends", default=None,
                    help="comma-separated backend list (default: reference,blocked)")
    return ap


def _config(args) -> SolverConfig:
    return SolverConfig(tolerance=args.tol, max_iterations=args.max_iters,
                        restart_m=args.restart, block_size_b=args.block_size)


def _cmd_solve(args) -> int:
    cfg = _config(args)
    dtype = PRECISION_DTYPES[args.precision]
    if args.matrix is not None:
        A = np.asfortranarray(read_matrix_market(args.matrix), dtype=dtype)
        n = A.shape[0]
        rng = np.random.default_rng(args.seed)
        x_true = rng.uniform(-1.0, 1.0, size=n).astype(dtype)
        b = A @ x_true
    else:
        spec = ProblemSpec(kind=METHOD_FAMILY[args.method], n=args.n,
                           seed=args.seed, precision=args.precision)
        A, b, _ = generate_problem(spec)
    backend = get_backend(args.backend)
    try:
        x, report = solve_system(args.method, A, b, None, cfg, backend)
    except LinAlgError as exc:
        print(f"solve failed: {exc}", file=sys.stderr)
        return 1
    status = "converged" if report.converged else f"FAILED ({report.breakdown or 'no convergence'})"
    print(f"method={args.method} n={A.shape[0]} precision={args.precision} "
          f"backend={args.backend} {status}")
    print(f"iterations={report.iterations} "
          f"relative_residual={report.final_relative_residual:.3e} "
          f"wall_time={report.wall_time:.4f}s")
    return 0 if report.converged else 1


def _cmd_bench(args) -> int:
    cfg = _config(args)
    methods = [m.strip() for m in args.method.split(",") if m.strip()]
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    backends = ([b.strip() for b in args.backends.split(",") if b.strip()]
                if args.backends else list(BACKEND_NAMES))
    records = run_benchmark(methods, sizes, [args.precision], backends, cfg,
                            seed=args.seed, repeats=args.repeats)
    text = emit_report(records, format=args.output)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text)
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_bench(args)
    except (MatrixMarketError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
