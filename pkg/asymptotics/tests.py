import numpy as np
from django.test import SimpleTestCase

from asymptotics.delta import delta_method, finite_difference_jacobian, propagate_covariance
from asymptotics.normal_theory import fixed_design_covariance, fixed_design_intervals, pivot_statistics
from asymptotics.sandwich import sandwich_intervals, sandwich_parts
from bootstrap.engines import residual_bootstrap
from bootstrap.structures import BootConfig, BootstrapDraws
from core.exceptions import GradientMismatch, InvalidConfiguration, NearSingular
from regression.ols import fit_ols
from regression.structures import Dataset, FitResult
from tensorlinalg.operators import kron, vec
from tensorlinalg.spd import SpdMat

SIGMA = np.array([[1.0, 0.5], [0.5, 2.0]])


def homoskedastic_dataset(n, seed=0, beta=None):
    rng = np.random.default_rng(seed)
    X = np.column_stack([np.ones(n), rng.standard_normal(n)])
    beta = np.array([[2.0, -0.5], [0.3, 1.0]]) if beta is None else beta
    eps = rng.standard_normal((n, 2)) @ np.linalg.cholesky(SIGMA).T
    return Dataset(X, X @ beta.T + eps)


class FixedDesignIntervalTests(SimpleTestCase):
    def test_noiseless_data_gives_point_intervals(self):
        X = np.random.default_rng(1).standard_normal((10, 2))
        fit = fit_ols(Dataset(X, X @ np.array([[1.0, 2.0]]).T))
        table = fixed_design_intervals(fit, alpha=0.05)
        np.testing.assert_allclose(table.lower, fit.vec_beta, atol=1e-10)
        np.testing.assert_allclose(table.upper, fit.vec_beta, atol=1e-10)
        self.assertEqual(table.method, 'normal-fixed')

    def test_scalar_mean_half_width(self):
        """Test half-width 1.96*sqrt(4/4) for the mean of four cases with variance 4"""
        fit = fit_ols(Dataset(np.ones((4, 1)), [[3.0], [-1.0], [3.0], [-1.0]]))
        np.testing.assert_allclose(fit.sigma_hat, [[4.0]])
        table = fixed_design_intervals(fit, alpha=0.05)
        self.assertAlmostEqual(float(table.width[0]) / 2, 1.96, places=2)
        self.assertAlmostEqual(float(table.width[0]) / 2, 1.959964, places=5)

    def test_kronecker_ordering_matches_refit_covariance(self):
        """Test Cov(vec beta_hat) over 2000 refits against inv(X'X) kron Sigma within 5 standard errors"""
        rng = np.random.default_rng(77)
        n, refits = 30, 2000
        X = np.column_stack([np.ones(n), rng.uniform(-2, 2, n)])
        beta = np.array([[1.0, 0.5], [-1.0, 2.0]])
        root = np.linalg.cholesky(SIGMA)
        estimates = np.empty((refits, 4))
        for k in range(refits):
            Y = X @ beta.T + rng.standard_normal((n, 2)) @ root.T
            estimates[k] = fit_ols(Dataset(X, Y)).vec_beta
        expected = kron(np.linalg.inv(X.T @ X), SIGMA)
        observed = np.cov(estimates, rowvar=False)
        diag = np.diag(expected)
        se = np.sqrt((expected**2 + np.outer(diag, diag)) / refits)
        self.assertTrue(np.all(np.abs(observed - expected) <= 5 * se))


class SandwichTests(SimpleTestCase):
    def test_single_nonzero_residual_row(self):
        X = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        residuals = np.zeros((3, 2))
        residuals[0] = [0.5, -1.0]
        data = Dataset(X, residuals)
        fit = FitResult(np.zeros((2, 2)), residuals, np.zeros((2, 2)), np.zeros(2), SpdMat(X.T @ X))
        parts = sandwich_parts(data, fit)
        expected = np.zeros((4, 4))
        expected[:2, :2] = np.outer(residuals[0], residuals[0]) / 3
        np.testing.assert_allclose(parts.M_hat, expected, atol=1e-15)

    def test_delta_recomputable_from_parts(self):
        data = homoskedastic_dataset(200)
        parts = sandwich_parts(data, fit_ols(data))
        outer = kron(np.linalg.inv(parts.W.matrix), np.eye(2))
        np.testing.assert_allclose(parts.Delta_hat, outer @ parts.M_hat @ outer, rtol=1e-10, atol=1e-12)
        self.assertGreaterEqual(np.linalg.eigvalsh(parts.M_hat)[0], -1e-12)

    def test_reduces_to_fixed_design_form(self):
        data = homoskedastic_dataset(5000, seed=3)
        fit = fit_ols(data)
        parts = sandwich_parts(data, fit)
        fixed = kron(np.linalg.inv(parts.W.matrix), fit.sigma_hat)
        gap = np.linalg.norm(parts.Delta_hat - fixed) / np.linalg.norm(parts.Delta_hat)
        self.assertLessEqual(gap, 0.1)
        np.testing.assert_allclose(fixed / data.n, fixed_design_covariance(fit), rtol=1e-8)

    def test_approaches_population_covariance(self):
        data = homoskedastic_dataset(5000, seed=4)
        parts = sandwich_parts(data, fit_ols(data))
        target = kron(np.eye(2), SIGMA)
        self.assertLessEqual(np.linalg.norm(parts.Delta_hat - target) / np.linalg.norm(target), 0.1)

    def test_intervals_use_delta_over_n(self):
        data = homoskedastic_dataset(300, seed=5)
        fit = fit_ols(data)
        parts = sandwich_parts(data, fit)
        table = sandwich_intervals(parts, fit, alpha=0.1)
        half = 1.6448536269514722 * np.sqrt(np.diag(parts.Delta_hat) / data.n)
        np.testing.assert_allclose(table.upper - fit.vec_beta, half, rtol=1e-9)
        self.assertEqual(table.method, 'normal-sandwich')


class PivotTests(SimpleTestCase):
    def setUp(self):
        self.data = homoskedastic_dataset(80, seed=6)
        self.fit = fit_ols(self.data)

    def test_draws_at_estimate_give_zero_pivots(self):
        draws = BootstrapDraws(
            method='residual',
            draws=np.tile(self.fit.vec_beta, (5, 1)),
            var_star=np.zeros((4, 4)),
            sigma_star=np.tile(np.eye(2), (5, 1, 1)),
            resample_counts=np.zeros(80, dtype=int),
            config=BootConfig(B=5),
        )
        np.testing.assert_array_equal(pivot_statistics(self.fit, draws), np.zeros((5, 4)))

    def test_matches_explicit_kronecker_form(self):
        draws = residual_bootstrap(self.fit, self.data.X, BootConfig(B=20, seed=3))
        pivots = pivot_statistics(self.fit, draws)
        root = np.asarray(SpdMat(self.data.X.T @ self.data.X).sqrt())
        for b in (0, 7, 19):
            scale = np.asarray(SpdMat(draws.sigma_star[b]).inverse_sqrt())
            expected = kron(root, scale) @ (draws.draws[b] - self.fit.vec_beta)
            np.testing.assert_allclose(pivots[b], expected, atol=1e-9)

    def test_singular_sigma_star_raises(self):
        draws = BootstrapDraws(
            method='residual',
            draws=np.tile(self.fit.vec_beta, (2, 1)),
            var_star=np.zeros((4, 4)),
            sigma_star=np.zeros((2, 2, 2)),
            resample_counts=np.zeros(80, dtype=int),
            config=BootConfig(B=2),
        )
        with self.assertRaises(NearSingular):
            pivot_statistics(self.fit, draws)


class DeltaMethodTests(SimpleTestCase):
    def setUp(self):
        self.data = homoskedastic_dataset(200, seed=8)
        self.fit = fit_ols(self.data)
        self.V = fixed_design_covariance(self.fit)

    def test_identity_returns_covariance(self):
        out = delta_method(self.fit, lambda v: v)
        np.testing.assert_allclose(out, self.V, rtol=1e-6, atol=1e-12)

    def test_scaled_linear_functional(self):
        a = np.array([1.0, -2.0, 0.5, 3.0])
        out = delta_method(self.fit, lambda v: 2.5 * a @ v)
        self.assertEqual(out.shape, (1, 1))
        self.assertAlmostEqual(float(out[0, 0]) / (2.5**2 * a @ self.V @ a), 1.0, places=6)

    def test_callback_agrees_with_finite_differences(self):
        a = np.array([[1.0, 0.0, 2.0, -1.0], [0.5, 0.5, 0.0, 1.0]])
        with_grad = propagate_covariance(self.fit.vec_beta, self.V, lambda v: a @ v, lambda v: a)
        numeric = propagate_covariance(self.fit.vec_beta, self.V, lambda v: a @ v)
        np.testing.assert_allclose(with_grad, numeric, rtol=1e-6)

    def test_wrong_gradient_raises(self):
        with self.assertRaises(GradientMismatch):
            delta_method(self.fit, lambda v: v[0] ** 2, grad_f=lambda v: np.array([[1.0, 0.0, 0.0, 0.0]]))

    def test_finite_difference_step(self):
        """Test the step scales with large coordinates and floors at small ones"""
        jacobian = finite_difference_jacobian(lambda v: np.array([v[0] ** 2, 3 * v[1]]), np.array([1e8, 0.0]))
        np.testing.assert_allclose(jacobian, [[2e8, 0.0], [0.0, 3.0]], rtol=1e-6, atol=1e-9)

    def test_square_matches_bootstrap_variance(self):
        """Test 4 v1^2 V11 against the variance of v1^2 over the bootstrap draws"""
        draws = residual_bootstrap(self.fit, self.data.X, BootConfig(B=4000, seed=12))
        out = delta_method(self.fit, lambda v: v[0] ** 2, method='bootstrap', draws=draws)
        brute = np.var(draws.draws[:, 0] ** 2, ddof=1)
        self.assertAlmostEqual(float(out[0, 0]) / brute, 1.0, delta=0.1)

    def test_sandwich_method_needs_data(self):
        with self.assertRaises(InvalidConfiguration):
            delta_method(self.fit, lambda v: v, method='sandwich')
        out = delta_method(self.fit, lambda v: v, method='sandwich', data=self.data)
        self.assertEqual(out.shape, (4, 4))

    def test_unknown_method(self):
        with self.assertRaises(InvalidConfiguration):
            delta_method(self.fit, lambda v: v, method='jackknife')

    def test_vec_point_of_evaluation(self):
        out = delta_method(self.fit, lambda v: v[1])
        self.assertAlmostEqual(float(out[0, 0]), self.V[1, 1], places=10)
        self.assertEqual(vec(self.fit.beta_hat)[1], self.fit.beta_hat[1, 0])
