import numpy as np
import pytest

from core.errors import InvalidInputError, UnsupportedRingError
from core.exactla import (
    Ring,
    cokernel,
    column_rank,
    det_mod_p,
    diagonal,
    invariant_factors,
    inverse_mod_p,
    kernel_basis,
    kernel_mod_p,
    kron_int,
    lattice_contains,
    matmul_int,
    matrix,
    rank,
    rank_mod_p,
    rref,
    rref_mod_p,
    smith_normal_form,
    solve,
    to_int_rows,
)

F2 = Ring.prime_field(2)
F3 = Ring.prime_field(3)
Z = Ring.integers()
Q = Ring.rationals()


class TestRing:
    @pytest.mark.parametrize("text,label", [("Z", "Z"), ("q", "Q"), ("F3", "F3"), ("GF(5)", "F5")])
    def test_parse(self, text, label):
        assert Ring.parse(text).label == label

    def test_fp_uses_default_prime(self):
        assert Ring.parse("Fp", 7) == Ring.prime_field(7)

    def test_fp_without_prime(self):
        with pytest.raises(InvalidInputError):
            Ring.parse("Fp")

    def test_composite_field_rejected(self):
        with pytest.raises(InvalidInputError):
            Ring.prime_field(4)


class TestFieldOperations:
    def test_rref_identity(self):
        R, pivots, r = rref(matrix(np.eye(3, dtype=int).tolist(), F2))
        assert to_int_rows(R) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        assert pivots == (0, 1, 2)
        assert r == 3

    def test_rref_equal_rows(self):
        R, pivots, r = rref(matrix([[1, 1], [1, 1]], F2))
        assert to_int_rows(R) == [[1, 1], [0, 0]]
        assert r == 1

    def test_rank_matches_numpy_kernel(self):
        rng = np.random.default_rng(11)
        for _ in range(5):
            A = rng.integers(0, 3, size=(5, 7))
            assert rank(matrix(A.tolist(), F3)) == rank_mod_p(A, 3)

    def test_rank_nullity(self):
        rng = np.random.default_rng(3)
        A = rng.integers(0, 3, size=(4, 6))
        M = matrix(A.tolist(), F3)
        K = kernel_basis(M)
        assert rank(M) + K.shape[0] == 6
        product = to_int_rows(M * K.transpose())
        assert all(v == 0 for row in product for v in row)

    def test_kernel_needs_field(self):
        with pytest.raises(UnsupportedRingError):
            kernel_basis(matrix([[1, 2]], Z))

    def test_rref_mod_p_drops_zero_rows(self):
        R, pivots = rref_mod_p(np.array([[2, 1], [1, 2]]), 3)
        assert R.tolist() == [[1, 2]]
        assert pivots == [0]

    @pytest.mark.parametrize("p", [2, 3, 5])
    def test_array_kernels_agree_with_domain_matrices(self, p):
        rng = np.random.default_rng(p)
        F = Ring.prime_field(p)
        for _ in range(4):
            A = rng.integers(0, p, size=(4, 6))
            R, pivots, r = rref(matrix(A.tolist(), F))
            R_np, pivots_np = rref_mod_p(A, p)
            assert R_np.tolist() == to_int_rows(R)[:r]
            assert tuple(pivots_np) == pivots
            K = kernel_mod_p(A, 6, p)
            assert K.shape == (6 - r, 6)
            assert not ((A @ K.T.astype(np.int64)) % p).any()
            sympy_kernel = np.array(to_int_rows(kernel_basis(matrix(A.tolist(), F))))
            assert rank_mod_p(np.vstack([K, sympy_kernel]), p) == 6 - r

    def test_kernel_mod_p(self):
        A = np.array([[1, 1, 0], [0, 1, 1]])
        K = kernel_mod_p(A, 3, 2)
        assert K.shape == (1, 3)
        assert not ((A @ K.T.astype(np.int64)) % 2).any()

    def test_solve(self):
        K = F3.domain
        assert solve(matrix([[1, 1], [0, 1]], F3), [2, 1]) == [K(1), K(1)]
        assert solve(matrix([[1], [1]], F3), [0, 1]) is None
        assert solve(matrix([[2]], Q), [1])[0] == Q.domain(1) / Q.domain(2)

    def test_solve_needs_a_field(self):
        with pytest.raises(UnsupportedRingError):
            solve(matrix([[2]], Z), [1])

    def test_det_and_inverse(self):
        A = np.array([[2, 1], [1, 1]])
        assert det_mod_p(A, 3) == 1
        inv = inverse_mod_p(A, 3).astype(np.int64)
        assert ((A @ inv) % 3 == np.eye(2, dtype=np.int64)).all()

    def test_singular_inverse(self):
        with pytest.raises(ZeroDivisionError):
            inverse_mod_p(np.array([[1, 1], [1, 1]]), 2)
        assert det_mod_p(np.array([[1, 1], [1, 1]]), 2) == 0


class TestIntegers:
    def test_smith_normal_form(self):
        M = matrix([[2, 4], [6, 8]], Z)
        D, U, V = smith_normal_form(M)
        assert U * M * V == D
        assert sorted(abs(d) for d in diagonal(D)) == [2, 4]

    def test_invariant_factors_with_unit_pivots(self):
        columns = [{0: 1, 1: 1}, {1: 2}]
        assert invariant_factors(columns, 2) == [1, 2]

    def test_invariant_factors_dense_residue(self):
        assert invariant_factors([{0: 2}, {1: 3}], 2) == [1, 6]

    def test_cokernel_depends_on_ring(self):
        columns = [{0: 2}]
        assert cokernel(columns, 1, Z) == (0, (2,))
        assert cokernel(columns, 1, Q) == (0, ())
        assert cokernel(columns, 1, F2) == (1, ())

    def test_column_rank_over_field(self):
        columns = [{0: 2, 1: 2}, {0: 1}]
        assert column_rank(columns, 2, Q) == 2
        assert column_rank(columns, 2, F2) == 1

    def test_lattice_contains(self):
        gens = [{0: 2}]
        assert lattice_contains(gens, [{0: 4}], 1, Z)
        assert not lattice_contains(gens, [{0: 1}], 1, Z)
        assert lattice_contains(gens, [{0: 1}], 1, Q)

    def test_dense_products(self):
        A = [[1, 2], [0, 1]]
        assert matmul_int(A, [[1, 0], [0, 1]]) == A
        assert kron_int([[1]], A) == A
        assert kron_int([[0, 1], [1, 0]], [[2]]) == [[0, 2], [2, 0]]
