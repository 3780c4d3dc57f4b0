from fractions import Fraction
from math import comb

import numpy as np
import pytest
from conftest import int_matrices
from hypothesis import given
from hypothesis import strategies as st

from polydyn.linalg import (
    IntPolynomial,
    LatticeMatrix,
    RefinementError,
    SplittingError,
    char_poly,
    det,
    eigen_moduli,
    exterior_power,
    invariance_residual,
    invariant_splitting,
    mat_pow,
    rational_inverse,
    squarefree_decomposition,
    sup_norm,
)

GOLDEN = (1 + 5**0.5) / 2


def M(*rows):
    return LatticeMatrix.from_rows(rows)


class TestMatPow:
    def test_diagonal(self):
        assert mat_pow(LatticeMatrix.diag(2, 3), 3) == LatticeMatrix.diag(8, 27)

    def test_shear(self):
        assert mat_pow(M([1, 1], [0, 1]), 5) == M([1, 5], [0, 1])

    def test_zero_power_is_identity(self):
        assert mat_pow(M([4, -1], [7, 2]), 0) == LatticeMatrix.identity(2)

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError):
            mat_pow(LatticeMatrix.identity(2), -1)

    @given(int_matrices(3, invertible=False), st.integers(0, 6), st.integers(0, 6))
    def test_power_law(self, A, n, m):
        assert mat_pow(A, n + m) == mat_pow(A, n) @ mat_pow(A, m)


class TestDet:
    @pytest.mark.parametrize(
        "A, expected",
        [(LatticeMatrix.diag(2, 3), 6), (-LatticeMatrix.identity(2), 1), (M([1, 1], [0, 1]), 1)],
    )
    def test_examples(self, A, expected):
        assert det(A) == expected

    @given(int_matrices(4, invertible=False))
    def test_matches_float(self, A):
        assert det(A) == round(np.linalg.det(A.to_numpy().astype(float)))

    @given(int_matrices(3, invertible=False), int_matrices(3, invertible=False))
    def test_multiplicative(self, A, B):
        assert det(A @ B) == det(A) * det(B)

    def test_rational_inverse(self):
        A = M([2, 1], [1, 1])
        inv = rational_inverse(A)
        assert inv == [[1, -1], [-1, 2]]
        inv = rational_inverse(LatticeMatrix.diag(2, 3))
        assert inv == [[Fraction(1, 2), 0], [0, Fraction(1, 3)]]


class TestCharPoly:
    def test_diag(self):
        assert char_poly(LatticeMatrix.diag(2, 3)).coefficients == (6, -5, 1)

    def test_fibonacci(self):
        assert char_poly(M([0, 1], [1, 1])).coefficients == (-1, -1, 1)

    def test_identity(self):
        assert char_poly(LatticeMatrix.identity(2)).coefficients == (1, -2, 1)

    @given(int_matrices(4, invertible=False))
    def test_cayley_hamilton(self, A):
        # p(A) = 0 exactly
        p = char_poly(A).coefficients
        acc = [[0] * A.d for _ in range(A.d)]
        power = LatticeMatrix.identity(A.d)
        for c in p:
            acc = [[a + c * b for a, b in zip(ra, rb)] for ra, rb in zip(acc, power.rows)]
            power = power @ A
        assert all(x == 0 for row in acc for x in row)

    @given(int_matrices(3, invertible=False))
    def test_constant_term_is_signed_det(self, A):
        p = char_poly(A)
        assert p.degree == 3
        assert p.coefficients[0] == (-1) ** A.d * det(A)

    def test_squarefree(self):
        # (x - 1)^2 (x + 2) = x^3 - 3x + 2
        parts = squarefree_decomposition(IntPolynomial((2, -3, 0, 1)))
        assert sorted((m, tuple(f)) for f, m in parts) == [(1, (2, 1)), (2, (-1, 1))]


class TestExteriorPower:
    def test_diag(self):
        assert exterior_power(LatticeMatrix.diag(2, 3, 5), 2) == LatticeMatrix.diag(6, 10, 15)

    def test_lex_order(self):
        A = M([1, 2, 0], [0, 1, 3], [4, 0, 1])
        W = exterior_power(A, 2)
        # row {1,3}, column {2,3}: minor of rows 0,2 and columns 1,2
        assert W[1, 2] == 2 * 1 - 0 * 0

    @given(int_matrices(3, invertible=False))
    def test_degree_one_and_top(self, A):
        assert exterior_power(A, 1) == A
        assert exterior_power(A, 3) == LatticeMatrix.from_rows([[det(A)]])
        assert exterior_power(A, 0) == LatticeMatrix.identity(1)

    @given(int_matrices(3, invertible=False), int_matrices(3, invertible=False), st.integers(1, 3))
    def test_functorial(self, A, B, k):
        assert exterior_power(A @ B, k) == exterior_power(A, k) @ exterior_power(B, k)

    @given(st.integers(2, 4).flatmap(lambda d: st.tuples(int_matrices(d, -2, 2, invertible=False), st.integers(1, d))))
    def test_sylvester_franke(self, Ak):
        A, k = Ak
        assert det(exterior_power(A, k)) == det(A) ** comb(A.d - 1, k - 1)


class TestSupNorm:
    def test_examples(self):
        assert sup_norm(LatticeMatrix.diag(8, 27)) == 27
        assert sup_norm(M([1, 5], [0, 1])) == 5
        assert sup_norm(LatticeMatrix.from_rows([[0, 0], [0, 0]])) == 0


class TestEigenModuli:
    def test_diag(self):
        assert eigen_moduli(LatticeMatrix.diag(2, 3)).moduli == (3.0, 2.0)

    def test_golden(self):
        mods = eigen_moduli(M([0, 1], [1, 1])).moduli
        assert mods == pytest.approx([GOLDEN, GOLDEN - 1], abs=1e-12)

    def test_minus_identity(self):
        assert eigen_moduli(-LatticeMatrix.identity(3)).moduli == (1.0, 1.0, 1.0)

    def test_rotation(self):
        assert eigen_moduli(M([0, -1], [1, 0])).moduli == pytest.approx([1, 1], abs=1e-12)

    def test_repeated_complex_pair(self):
        # (x^2 + 1)^2: complex roots of multiplicity two
        A = M([0, -1, 1, 0], [1, 0, 0, 1], [0, 0, 0, -1], [0, 0, 1, 0])
        assert eigen_moduli(A).moduli == pytest.approx([1] * 4, abs=1e-12)

    @given(int_matrices(4, invertible=False))
    def test_product_is_abs_det(self, A):
        data = eigen_moduli(A)
        assert np.prod(data.moduli) == pytest.approx(abs(det(A)), rel=4 * 1e-9, abs=4 * 1e-9)
        assert max(data.certified_error) <= 1e-9

    @given(int_matrices(4, invertible=False))
    def test_matches_numpy(self, A):
        ours = eigen_moduli(A).moduli
        ref = sorted(np.abs(np.linalg.eigvals(A.to_numpy().astype(float))), reverse=True)
        # numpy is only accurate to ~sqrt(eps) on defective matrices
        assert ours == pytest.approx(ref, abs=1e-5)

    def test_tolerance_too_tight(self):
        with pytest.raises(RefinementError):
            eigen_moduli(M([2, 1], [1, 1]), tol=1e-300)


class TestSplitting:
    def test_diag(self):
        s = invariant_splitting(LatticeMatrix.diag(2, 3), 1)
        assert np.allclose(np.abs(s.basis_u[:, 0]), [0, 1])
        assert np.allclose(np.abs(s.basis_s[:, 0]), [1, 0])

    def test_diag3(self):
        s = invariant_splitting(LatticeMatrix.diag(6, 2, 1), 1)
        assert np.allclose(np.abs(s.basis_u[:, 0]), [1, 0, 0])
        assert s.basis_s.shape == (3, 2)
        assert np.allclose(s.basis_s[0], 0)

    def test_golden(self):
        u = invariant_splitting(M([0, 1], [1, 1]), 1).basis_u[:, 0]
        assert u[1] / u[0] == pytest.approx(GOLDEN, rel=1e-12)

    def test_degenerate_ends(self):
        A = M([2, 1], [1, 1])
        assert invariant_splitting(A, 0).basis_u.shape == (2, 0)
        assert invariant_splitting(A, 2).basis_s.shape == (2, 0)

    def test_resonant_rejected(self):
        with pytest.raises(SplittingError):
            invariant_splitting(LatticeMatrix.diag(5, 5, 2), 1)

    @given(int_matrices(3).filter(lambda A: len(set(np.round(eigen_moduli(A).moduli, 6))) == 3), st.integers(1, 2))
    def test_invariance(self, A, k):
        s = invariant_splitting(A, k)
        assert invariance_residual(A, s.basis_u) <= 1e-9
        assert invariance_residual(A, s.basis_s) <= 1e-9
