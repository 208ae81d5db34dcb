import numpy as np
import pytest

from densolve import (
    ReferenceBackend,
    SingularMatrixError,
    SolverConfig,
    gauss_seidel_solve,
    jacobi_solve,
    lu_factor_blocked,
    lu_solve,
)
from densolve.harness import ProblemSpec, generate_problem


def dominant_problem(n, seed):
    return generate_problem(ProblemSpec(kind="diag_dominant", n=n, seed=seed))


class TestJacobi:
    def test_diagonal_system_one_iteration(self):
        A = np.asfortranarray(np.diag([2.0, 4.0]))
        b = np.array([2.0, 8.0])
        x, rep = jacobi_solve(A, b, np.zeros(2), SolverConfig(), ReferenceBackend())
        assert np.allclose(x, [1.0, 2.0])
        assert rep.converged and rep.iterations == 1
        assert rep.final_relative_residual == 0.0

    def test_identity_converges_immediately(self, rng):
        A = np.asfortranarray(np.eye(5))
        b = rng.standard_normal(5)
        x, rep = jacobi_solve(A, b, np.zeros(5), SolverConfig(), ReferenceBackend())
        assert rep.converged and rep.iterations == 1
        assert rep.final_relative_residual == 0.0

    def test_dominant_matches_lu_oracle(self):
        A, b, _ = dominant_problem(128, 42)
        cfg = SolverConfig()
        x, rep = jacobi_solve(A, b, np.zeros_like(b), cfg, ReferenceBackend())
        assert rep.converged
        x_lu = lu_solve(lu_factor_blocked(A, 32, ReferenceBackend()), b)
        assert np.linalg.norm(x - x_lu) <= 10 * cfg.tolerance * np.linalg.norm(x_lu)

    def test_one_gemv_per_iteration(self):
        A, b, _ = dominant_problem(32, 0)
        be = ReferenceBackend()
        x, rep = jacobi_solve(A, b, np.zeros_like(b), SolverConfig(), be)
        # one initial residual matvec plus one per iteration
        assert be.counters.gemv_calls == rep.iterations + 1

    def test_zero_diagonal_rejected(self):
        A = np.asfortranarray([[0.0, 1.0], [1.0, 1.0]])
        with pytest.raises(SingularMatrixError):
            jacobi_solve(A, np.ones(2), np.zeros(2), SolverConfig(), ReferenceBackend())

    def test_nonconvergence_is_report_not_error(self):
        A = np.asfortranarray([[1.0, 2.0], [2.0, 1.0]])  # not dominant; Jacobi diverges
        x, rep = jacobi_solve(A, np.ones(2), np.zeros(2),
                              SolverConfig(max_iterations=5), ReferenceBackend())
        assert not rep.converged
        assert rep.iterations == 5


class TestGaussSeidel:
    def test_diagonal_system_matches_jacobi(self):
        A = np.asfortranarray(np.diag([2.0, 4.0]))
        b = np.array([2.0, 8.0])
        xj, rj = jacobi_solve(A, b, np.zeros(2), SolverConfig(), ReferenceBackend())
        xg, rg = gauss_seidel_solve(A, b, np.zeros(2), SolverConfig(), ReferenceBackend())
        assert np.allclose(xj, xg)
        assert rg.iterations == 1

    def test_lower_triangular_exact_in_one_sweep(self, rng):
        n = 8
        A = np.asfortranarray(np.tril(rng.uniform(-1.0, 1.0, size=(n, n)), -1) / n + np.eye(n))
        b = rng.standard_normal(n)
        x, rep = gauss_seidel_solve(A, b, np.zeros(n), SolverConfig(), ReferenceBackend())
        assert rep.converged and rep.iterations == 1
        assert np.allclose(A @ x, b)

    def test_dominant_matches_lu_oracle(self):
        A, b, _ = dominant_problem(128, 42)
        cfg = SolverConfig()
        x, rep = gauss_seidel_solve(A, b, np.zeros_like(b), cfg, ReferenceBackend())
        assert rep.converged
        x_lu = lu_solve(lu_factor_blocked(A, 32, ReferenceBackend()), b)
        assert np.linalg.norm(x - x_lu) <= 10 * cfg.tolerance * np.linalg.norm(x_lu)

    def test_zero_diagonal_rejected(self):
        A = np.asfortranarray([[1.0, 1.0], [1.0, 0.0]])
        with pytest.raises(SingularMatrixError):
            gauss_seidel_solve(A, np.ones(2), np.zeros(2), SolverConfig(),
                               ReferenceBackend())


@pytest.mark.parametrize("solver", [jacobi_solve, gauss_seidel_solve])
@pytest.mark.parametrize("n", [64, 256])
def test_dominant_family_always_converges(solver, n):
    for seed in range(20):
        A, b, _ = generate_problem(ProblemSpec(kind="diag_dominant", n=n, seed=seed))
        x, rep = solver(A, b, np.zeros_like(b), SolverConfig(), ReferenceBackend())
        assert rep.converged, f"seed {seed} failed"
        assert rep.final_relative_residual <= 1e-4


@pytest.mark.parametrize("solver", [jacobi_solve, gauss_seidel_solve])
def test_residual_history_is_finite(solver):
    # non-dominant but finite input: history must contain no NaN/Inf
    rng = np.random.default_rng(9)
    A = np.asfortranarray(rng.uniform(-1.0, 1.0, size=(16, 16)) + np.eye(16))
    b = rng.standard_normal(16)
    x, rep = solver(A, b, np.zeros(16), SolverConfig(max_iterations=20),
                    ReferenceBackend())
    assert np.all(np.isfinite(rep.residual_history))
    assert len(rep.residual_history) == rep.iterations + 1
