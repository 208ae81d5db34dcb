import numpy as np
import pytest

from densolve import (
    DegenerateRhsError,
    DimensionError,
    PrecisionError,
    SolverConfig,
    apply_pivots,
    apply_pivots_inverse,
    permutation_matrix,
    permutation_sign,
    relative_residual,
)
from densolve.core import as_matrix, check_system, zeros_matrix


def naive_matvec(A, x):
    m, n = A.shape
    out = np.zeros(m)
    for i in range(m):
        for j in range(n):
            out[i] += A[i, j] * x[j]
    return out


class TestRelativeResidual:
    def test_exact_solution_is_zero(self):
        A = np.asfortranarray(np.eye(3))
        x = np.array([1.0, 2.0, 3.0])
        assert relative_residual(A, x, x) == 0.0

    def test_zero_guess_gives_one(self):
        A = np.asfortranarray(np.eye(2))
        assert relative_residual(A, np.zeros(2), np.array([3.0, 4.0])) == 1.0

    def test_matches_naive_oracle(self, rng):
        A = np.asfortranarray(rng.standard_normal((8, 8)))
        x = rng.standard_normal(8)
        b = rng.standard_normal(8)
        expected = np.sqrt(np.sum((b - naive_matvec(A, x)) ** 2)) / np.sqrt(np.sum(b**2))
        assert relative_residual(A, x, b) == pytest.approx(expected, rel=1e-14)

    def test_dimension_mismatch(self):
        A = np.asfortranarray(np.eye(3))
        with pytest.raises(DimensionError):
            relative_residual(A, np.zeros(2), np.zeros(3))

    def test_zero_rhs_rejected(self):
        A = np.asfortranarray(np.eye(2))
        with pytest.raises(DegenerateRhsError):
            relative_residual(A, np.zeros(2), np.zeros(2))


class TestColumnMajorStorage:
    def test_addressing_round_trip(self, rng):
        rows, cols = 7, 5
        A = zeros_matrix(rows, cols)
        vals = rng.standard_normal((rows, cols))
        for i in range(rows):
            for j in range(cols):
                A[i, j] = vals[i, j]
        flat = A.ravel(order="K")  # physical buffer order
        for i in range(rows):
            for j in range(cols):
                assert flat[i + j * rows] == vals[i, j]

    def test_as_matrix_is_fortran_order(self):
        A = as_matrix([[1.0, 2.0], [3.0, 4.0]])
        assert A.flags.f_contiguous


class TestPivots:
    @pytest.mark.parametrize("seed", range(5))
    def test_apply_then_inverse_is_identity(self, seed):
        rng = np.random.default_rng(seed)
        n = 17
        pivots = np.array([rng.integers(k, n) for k in range(n)])
        v = rng.standard_normal(n)
        assert np.array_equal(apply_pivots_inverse(pivots, apply_pivots(pivots, v)), v)

    def test_application_is_bijection(self, rng):
        n = 12
        pivots = np.array([rng.integers(k, n) for k in range(n)])
        perm = apply_pivots(pivots, np.arange(n))
        assert sorted(perm) == list(range(n))

    def test_permutation_matrix_and_sign(self):
        pivots = np.array([1, 1])  # single swap of rows 0 and 1
        P = permutation_matrix(pivots, 2)
        assert np.array_equal(P, np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert permutation_sign(pivots) == -1
        assert permutation_sign(np.array([0, 1])) == 1


class TestSolverConfig:
    def test_defaults_follow_experiment_protocol(self):
        cfg = SolverConfig()
        assert cfg.tolerance == 1e-4
        assert cfg.restart_m == 35
        assert cfg.block_size_b == 64
        assert cfg.orthogonalization == "modified"

    @pytest.mark.parametrize("kwargs", [
        {"tolerance": 0.0},
        {"tolerance": -1e-4},
        {"restart_m": 0},
        {"block_size_b": 0},
        {"orthogonalization": "none"},
        {"max_iterations": 0},
    ])
    def test_invalid_config_rejected(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)

    def test_iteration_cap_default(self):
        assert SolverConfig().iteration_cap(50) == 500
        assert SolverConfig(max_iterations=7).iteration_cap(50) == 7


def test_mixed_precision_rejected():
    A = np.asfortranarray(np.eye(3, dtype=np.float32))
    b = np.ones(3, dtype=np.float64)
    with pytest.raises(PrecisionError):
        check_system(A, b)
