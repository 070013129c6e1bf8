import numpy as np
from django.test import SimpleTestCase

from core.exceptions import AsymmetricInput, DimensionMismatch, NearSingular
from tensorlinalg.operators import kron, unvec, unvech, vec, vech
from tensorlinalg.spd import SpdMat, psd_root, spd_inverse, spd_sqrt


def random_spd(rng, k):
    g = rng.standard_normal((k, k))
    return g.T @ g + np.eye(k)


class VecOperatorTests(SimpleTestCase):
    def test_vec_stacks_columns(self):
        """Test vec places A(i,j) at index i + r*j"""
        np.testing.assert_array_equal(vec([[1, 2], [3, 4]]), [1, 3, 2, 4])

    def test_vec_of_column_vector_is_identity(self):
        v = np.array([5.0, -1.0, 2.5])
        np.testing.assert_array_equal(vec(v), v)

    def test_vec_identity(self):
        np.testing.assert_array_equal(vec(np.eye(2)), [1, 0, 0, 1])

    def test_vec_is_linear(self):
        rng = np.random.default_rng(3)
        a, b = rng.standard_normal((2, 3, 4))
        np.testing.assert_allclose(vec(2.5 * a - 0.5 * b), 2.5 * vec(a) - 0.5 * vec(b), atol=1e-12)

    def test_unvec_inverts_vec(self):
        a = np.arange(12.0).reshape(3, 4)
        np.testing.assert_array_equal(unvec(vec(a), rows=3), a)

    def test_unvec_rejects_bad_row_count(self):
        with self.assertRaises(DimensionMismatch):
            unvec(np.arange(5.0), rows=2)


class VechOperatorTests(SimpleTestCase):
    def test_vech_two_by_two(self):
        np.testing.assert_array_equal(vech([[1, 2], [2, 3]]), [1, 2, 3])

    def test_vech_scalar(self):
        np.testing.assert_array_equal(vech([[7.5]]), [7.5])

    def test_vech_identity(self):
        np.testing.assert_array_equal(vech(np.eye(3)), [1, 0, 0, 1, 0, 1])

    def test_vech_length(self):
        a = random_spd(np.random.default_rng(0), 5)
        self.assertEqual(vech(a).size, 15)

    def test_vech_rejects_asymmetric_input(self):
        with self.assertRaises(AsymmetricInput):
            vech([[1.0, 2.0], [2.5, 3.0]])

    def test_duplication_round_trip_is_exact(self):
        """Test rebuilding the symmetric matrix from vech returns the input exactly"""
        a = random_spd(np.random.default_rng(1), 4)
        a = 0.5 * (a + a.T)
        np.testing.assert_array_equal(unvech(vech(a)), a)

    def test_unvech_rejects_non_triangular_length(self):
        with self.assertRaises(DimensionMismatch):
            unvech(np.arange(4.0))


class KroneckerTests(SimpleTestCase):
    def test_kron_with_unit_scalar(self):
        a = np.arange(6.0).reshape(2, 3)
        np.testing.assert_array_equal(kron(np.eye(1), a), a)

    def test_identity_kron_is_block_diagonal(self):
        b = np.array([[1.0, 2.0], [3.0, 4.0]])
        expected = np.block([[b, np.zeros((2, 2))], [np.zeros((2, 2)), b]])
        np.testing.assert_array_equal(kron(np.eye(2), b), expected)

    def test_vec_of_triple_product(self):
        """Test vec(PQR) = (R^T kron P) vec(Q)"""
        rng = np.random.default_rng(11)
        for _ in range(20):
            p, q, r = rng.standard_normal((3, 2, 2))
            np.testing.assert_allclose(vec(p @ q @ r), kron(r.T, p) @ vec(q), atol=1e-12)

    def test_mixed_product_identity(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            a = rng.standard_normal((2, 3))
            c = rng.standard_normal((3, 2))
            b = rng.standard_normal((3, 4))
            d = rng.standard_normal((4, 2))
            lhs = kron(a, b) @ kron(c, d)
            rhs = kron(a @ c, b @ d)
            np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-12)


class SpdMatTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(2024)

    def test_construction_symmetrizes(self):
        a = SpdMat([[2.0, 1.0 + 1e-13], [1.0, 2.0]])
        self.assertEqual(np.max(np.abs(a.matrix - a.matrix.T)), 0.0)

    def test_rejects_singular_matrix(self):
        with self.assertRaises(NearSingular):
            SpdMat([[1.0, 1.0], [1.0, 1.0]])

    def test_rejects_indefinite_matrix(self):
        with self.assertRaises(NearSingular):
            SpdMat([[1.0, 2.0], [2.0, 1.0]])

    def test_tolerance_is_scale_relative(self):
        """Test a well-conditioned matrix of tiny magnitude is accepted"""
        SpdMat(1e-14 * np.eye(3))

    def test_inverse_of_identity(self):
        np.testing.assert_allclose(spd_inverse(np.eye(3)).matrix, np.eye(3), atol=1e-15)

    def test_inverse_of_diagonal(self):
        np.testing.assert_allclose(spd_inverse(np.diag([2.0, 4.0])).matrix, np.diag([0.5, 0.25]), atol=1e-15)

    def test_inverse_residual(self):
        for k in (2, 3, 6):
            a = random_spd(self.rng, k)
            residual = a @ spd_inverse(a).matrix - np.eye(k)
            self.assertLess(np.max(np.abs(residual)), 1e-8)

    def test_sqrt_of_identity(self):
        np.testing.assert_allclose(spd_sqrt(np.eye(4)).matrix, np.eye(4), atol=1e-15)

    def test_sqrt_of_diagonal(self):
        np.testing.assert_allclose(spd_sqrt(np.diag([4.0, 9.0])).matrix, np.diag([2.0, 3.0]), atol=1e-14)

    def test_sqrt_squares_back(self):
        for k in (2, 3, 6):
            a = random_spd(self.rng, k)
            root = spd_sqrt(a).matrix
            np.testing.assert_array_equal(root, root.T)
            self.assertLess(np.max(np.abs(root @ root - a)), 1e-8)

    def test_sqrt_has_cholesky(self):
        """Test the symmetric root is itself positive definite"""
        root = spd_sqrt(random_spd(self.rng, 4))
        self.assertIsNotNone(root.cholesky)

    def test_inverse_sqrt(self):
        a = SpdMat(random_spd(self.rng, 3))
        w = a.inverse_sqrt().matrix
        np.testing.assert_allclose(w @ a.matrix @ w, np.eye(3), atol=1e-10)

    def test_solve_matches_inverse(self):
        a = SpdMat(random_spd(self.rng, 4))
        b = self.rng.standard_normal((4, 2))
        np.testing.assert_allclose(a.solve(b), spd_inverse(a).matrix @ b, atol=1e-10)

    def test_psd_root_allows_singular_input(self):
        a = np.array([[1.0, 1.0], [1.0, 1.0]])
        root = psd_root(a)
        np.testing.assert_allclose(root @ root, a, atol=1e-12)
        np.testing.assert_allclose(psd_root(np.zeros((2, 2))), np.zeros((2, 2)))
