import numpy as np
from django.test import SimpleTestCase

from core.exceptions import DegenerateResiduals, DimensionMismatch, InvalidDataset, SingularDesign
from regression.ols import fit_ols, sigma_hat
from regression.structures import Dataset, IntervalTable, vec_labels


def random_dataset(rng, n=40, p=3, r=2, noise=1.0, intercept=False):
    X = rng.standard_normal((n, p))
    if intercept:
        X[:, 0] = 1.0
    beta = rng.uniform(-1, 1, size=(r, p))
    Y = X @ beta.T + noise * rng.standard_normal((n, r))
    return Dataset(X, Y), beta


class DatasetTests(SimpleTestCase):
    def test_requires_more_cases_than_predictors(self):
        with self.assertRaises(InvalidDataset):
            Dataset(np.ones((2, 2)), np.ones((2, 1)))

    def test_rejects_non_finite_entries(self):
        X = np.ones((4, 1))
        Y = np.array([[1.0], [np.nan], [2.0], [3.0]])
        with self.assertRaises(InvalidDataset):
            Dataset(X, Y)

    def test_rejects_row_mismatch(self):
        with self.assertRaises(InvalidDataset):
            Dataset(np.ones((4, 1)), np.ones((3, 1)))

    def test_default_names_and_labels(self):
        data = Dataset(np.ones((3, 2)) + np.eye(3, 2), np.zeros((3, 2)))
        self.assertEqual(data.predictor_names, ('x1', 'x2'))
        self.assertEqual(data.labels, ('y1:x1', 'y2:x1', 'y1:x2', 'y2:x2'))

    def test_arrays_are_read_only(self):
        data, _ = random_dataset(np.random.default_rng(0))
        with self.assertRaises(ValueError):
            data.X[0, 0] = 5.0

    def test_take_repeats_rows(self):
        data, _ = random_dataset(np.random.default_rng(1), n=10)
        sub = data.take([0, 0, 1, 2])
        np.testing.assert_array_equal(sub.X[1], data.X[0])
        self.assertEqual(sub.n, 4)


class VecLabelTests(SimpleTestCase):
    def test_labels_follow_column_major_order(self):
        """Test label k names entry (k mod r, k div r) of beta"""
        labels = vec_labels(('mpg', 'disp'), ('(Intercept)', 'am1'))
        self.assertEqual(labels, ('mpg:(Intercept)', 'disp:(Intercept)', 'mpg:am1', 'disp:am1'))


class FitOlsTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(42)

    def test_noiseless_recovery(self):
        data, beta = random_dataset(self.rng, noise=0.0)
        fit = fit_ols(data)
        np.testing.assert_allclose(fit.beta_hat, beta, atol=1e-10)
        np.testing.assert_allclose(fit.sigma_hat, np.zeros((2, 2)), atol=1e-20)

    def test_line_through_origin(self):
        fit = fit_ols(Dataset([[1.0], [2.0]], [[2.0], [4.0]]))
        self.assertAlmostEqual(float(fit.beta_hat[0, 0]), 2.0, places=12)

    def test_matches_normal_equation_oracle(self):
        X = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        beta = np.array([[0.5, -1.0], [2.0, 0.25]])
        eps = np.array([[0.1, -0.2], [-0.3, 0.05], [0.2, 0.15]])
        Y = X @ beta.T + eps
        oracle = np.linalg.solve(X.T @ X, X.T @ Y).T
        fit = fit_ols(Dataset(X, Y))
        np.testing.assert_allclose(fit.beta_hat, oracle, atol=1e-10)

    def test_residual_rows(self):
        data, _ = random_dataset(self.rng)
        fit = fit_ols(data)
        for i in (0, 7, 39):
            np.testing.assert_allclose(fit.residuals[i], data.Y[i] - fit.beta_hat @ data.X[i], atol=1e-12)

    def test_residuals_orthogonal_to_design(self):
        data, _ = random_dataset(self.rng, n=200, p=4, r=3)
        fit = fit_ols(data)
        self.assertLess(np.max(np.abs(data.X.T @ fit.residuals)), 1e-8)

    def test_collinear_design_raises(self):
        X = np.array([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
        with self.assertRaises(SingularDesign):
            fit_ols(Dataset(X, np.ones((3, 1))))

    def test_projection_idempotence(self):
        data, _ = random_dataset(self.rng)
        fit = fit_ols(data)
        refit = fit_ols(Dataset(data.X, fit.fitted(data.X)))
        np.testing.assert_allclose(refit.beta_hat, fit.beta_hat, atol=1e-10)

    def test_scale_equivariance(self):
        data, _ = random_dataset(self.rng)
        fit = fit_ols(data)
        scaled = fit_ols(Dataset(data.X, 3.5 * data.Y))
        np.testing.assert_allclose(scaled.beta_hat, 3.5 * fit.beta_hat, rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(scaled.sigma_hat, 3.5**2 * fit.sigma_hat, rtol=1e-10, atol=1e-12)

    def test_intercept_centers_residuals(self):
        data, _ = random_dataset(self.rng, intercept=True)
        fit = fit_ols(data)
        np.testing.assert_allclose(fit.mu_hat, 0.0, atol=1e-10)
        raw = fit.residuals.T @ fit.residuals / data.n
        np.testing.assert_allclose(fit.sigma_hat, raw, atol=1e-10)

    def test_vec_beta_is_column_major(self):
        data, _ = random_dataset(self.rng)
        fit = fit_ols(data)
        self.assertEqual(fit.vec_beta[1], fit.beta_hat[1, 0])
        self.assertEqual(fit.vec_beta[2], fit.beta_hat[0, 1])


class SigmaHatTests(SimpleTestCase):
    def test_zero_residuals(self):
        sigma, mu = sigma_hat(np.zeros((5, 3)))
        np.testing.assert_array_equal(sigma, np.zeros((3, 3)))
        np.testing.assert_array_equal(mu, np.zeros(3))

    def test_two_point_symmetric_case(self):
        sigma, mu = sigma_hat([[1.0, 0.0], [-1.0, 0.0]])
        np.testing.assert_array_equal(mu, [0.0, 0.0])
        np.testing.assert_allclose(sigma, [[1.0, 0.0], [0.0, 0.0]], atol=1e-15)

    def test_matches_direct_sum(self):
        """Test the estimator against an explicit accumulation loop"""
        e = np.random.default_rng(5).standard_normal((50, 3))
        mean = np.zeros(3)
        for row in e:
            mean += row
        mean /= len(e)
        acc = np.zeros((3, 3))
        for row in e:
            acc += np.outer(row - mean, row - mean)
        sigma, mu = sigma_hat(e)
        np.testing.assert_allclose(mu, mean, atol=1e-12)
        np.testing.assert_allclose(sigma, acc / len(e), atol=1e-12)

    def test_single_row_raises(self):
        with self.assertRaises(DegenerateResiduals):
            sigma_hat(np.ones((1, 2)))


class IntervalTableTests(SimpleTestCase):
    def setUp(self):
        self.table = IntervalTable('percentile', ('a', 'b', 'c'), [0.0, 1.0, 2.0], [1.0, 1.0, 3.0], 0.05)

    def test_width_and_select(self):
        np.testing.assert_array_equal(self.table.width, [1.0, 0.0, 1.0])
        self.assertEqual(len(self.table.select(2)), 2)
        self.assertEqual(self.table.select(2).labels, ('a', 'b'))

    def test_covers_point_interval(self):
        """Test a point interval covers its own value up to the relative slack"""
        covered = self.table.covers([0.5, 1.0 + 1e-12, 3.5])
        np.testing.assert_array_equal(covered, [True, True, False])

    def test_label_count_must_match(self):
        with self.assertRaises(DimensionMismatch):
            IntervalTable('percentile', ('a',), [0.0, 1.0], [1.0, 2.0], 0.05)
