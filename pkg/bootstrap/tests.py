import numpy as np
from django.test import SimpleTestCase

from bootstrap.engines import pairs_bootstrap, residual_bootstrap
from bootstrap.intervals import percentile_interval, percentile_ranks, var_star
from bootstrap.structures import BootConfig
from core.exceptions import DimensionMismatch, InsufficientDraws, InvalidConfiguration, SingularResamples
from regression.ols import fit_ols
from regression.structures import Dataset


def simulated_dataset(seed=0, n=50, p=2, r=2):
    rng = np.random.default_rng(seed)
    X = np.column_stack([np.ones(n), rng.standard_normal((n, p - 1))])
    beta = rng.uniform(-1, 1, size=(r, p))
    return Dataset(X, X @ beta.T + rng.standard_normal((n, r)))


class BootConfigTests(SimpleTestCase):
    def test_defaults_come_from_settings(self):
        cfg = BootConfig(seed=3)
        self.assertEqual(cfg.alpha, 0.05)
        self.assertEqual(cfg.max_redraws, 100)
        self.assertIsNone(cfg.B)

    def test_resolve_uses_four_replicates_per_case(self):
        self.assertEqual(BootConfig().resolve(32).B, 128)
        self.assertEqual(BootConfig(B=10).resolve(32).B, 10)

    def test_rejects_bad_values(self):
        for kwargs in ({'B': 1}, {'alpha': 0.0}, {'alpha': 1.5}, {'seed': -1}, {'max_redraws': -2}):
            with self.subTest(**kwargs), self.assertRaises(InvalidConfiguration):
                BootConfig(**kwargs)


class VarStarTests(SimpleTestCase):
    def test_identical_draws(self):
        np.testing.assert_array_equal(var_star(np.tile([1.0, 2.0, 3.0], (5, 1))), np.zeros((3, 3)))

    def test_two_draw_closed_form(self):
        u = np.array([1.0, -2.0, 0.5])
        v = np.array([0.0, 1.0, 2.5])
        np.testing.assert_allclose(var_star([u, v]), 0.5 * np.outer(u - v, u - v), atol=1e-14)

    def test_matches_independent_accumulation(self):
        d = np.random.default_rng(9).standard_normal((20, 4))
        mean = d.sum(axis=0) / 20
        acc = np.zeros((4, 4))
        for row in d:
            acc += np.outer(row - mean, row - mean)
        np.testing.assert_allclose(var_star(d), acc / 19, atol=1e-12)

    def test_single_draw_raises(self):
        with self.assertRaises(InsufficientDraws):
            var_star(np.ones((1, 3)))


class PercentileIntervalTests(SimpleTestCase):
    def test_rank_arithmetic(self):
        """Test ranks ceil(2.5)=3 and ceil(97.5)=98 for B=100"""
        draws = np.random.default_rng(0).permutation(np.arange(1.0, 101.0))
        table = percentile_interval(draws, alpha=0.05)
        self.assertEqual(table.lower[0], 3.0)
        self.assertEqual(table.upper[0], 98.0)

    def test_integral_rank_is_not_bumped(self):
        self.assertEqual(percentile_ranks(200, 0.05), (5, 195))
        self.assertEqual(percentile_ranks(40, 0.05), (1, 39))

    def test_constant_draws(self):
        table = percentile_interval(np.full((50, 2), 1.25), alpha=0.05)
        np.testing.assert_array_equal(table.lower, [1.25, 1.25])
        np.testing.assert_array_equal(table.upper, [1.25, 1.25])

    def test_too_few_draws(self):
        with self.assertRaises(InsufficientDraws):
            percentile_interval(np.arange(20.0), alpha=0.05)

    def test_uses_draw_labels(self):
        data = simulated_dataset()
        draws = residual_bootstrap(fit_ols(data), data.X, BootConfig(B=40, seed=1))
        table = percentile_interval(draws)
        self.assertEqual(table.labels, data.labels)
        self.assertEqual(table.method, 'percentile')


class ResidualBootstrapTests(SimpleTestCase):
    def test_zero_residuals_reproduce_estimate(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((12, 2))
        fit = fit_ols(Dataset(X, X @ np.array([[1.0, -2.0], [0.5, 0.0]]).T))
        draws = residual_bootstrap(fit, X, BootConfig(B=30, seed=2))
        np.testing.assert_allclose(draws.draws, np.tile(fit.vec_beta, (30, 1)), atol=1e-10)
        np.testing.assert_allclose(draws.var_star, 0.0, atol=1e-18)

    def test_two_case_enumeration(self):
        """Test every draw is one of the four resample outcomes beta-1, beta, beta, beta+1"""
        X = np.array([[1.0], [1.0]])
        fit = fit_ols(Dataset(X, [[0.3 - 1.0], [0.3 + 1.0]]))
        allowed = np.array([-0.7, 0.3, 1.3])
        seen = set()
        for seed in range(50):
            draws = residual_bootstrap(fit, X, BootConfig(B=2, seed=seed)).draws.ravel()
            for value in draws:
                gaps = np.abs(allowed - value)
                self.assertLess(gaps.min(), 1e-12)
                seen.add(int(gaps.argmin()))
        self.assertEqual(seen, {0, 1, 2})

    def test_deterministic_across_thread_counts(self):
        data = simulated_dataset(n=60)
        fit = fit_ols(data)
        cfg = BootConfig(B=97, seed=11)
        serial = residual_bootstrap(fit, data.X, cfg, threads=1)
        parallel = residual_bootstrap(fit, data.X, cfg, threads=8)
        np.testing.assert_array_equal(serial.draws, parallel.draws)
        np.testing.assert_array_equal(serial.sigma_star, parallel.sigma_star)
        np.testing.assert_array_equal(serial.resample_counts, parallel.resample_counts)

    def test_stored_var_star_is_recomputable(self):
        data = simulated_dataset()
        draws = residual_bootstrap(fit_ols(data), data.X, BootConfig(B=64, seed=5))
        np.testing.assert_array_equal(var_star(draws.draws), draws.var_star)
        self.assertEqual(draws.sigma_star.shape, (64, 2, 2))
        np.testing.assert_array_equal(draws.sigma_star_last, draws.sigma_star[-1])

    def test_default_replicate_count(self):
        data = simulated_dataset(n=20)
        draws = residual_bootstrap(fit_ols(data), data.X, BootConfig(seed=0))
        self.assertEqual(draws.B, 80)
        self.assertEqual(draws.config.B, 80)

    def test_resampled_errors_are_centered(self):
        """Test the pooled mean of all resampled error rows is within 3 standard errors of zero"""
        n, B = 50, 2000
        data = simulated_dataset(seed=3, n=n)
        fit = fit_ols(data)
        draws = residual_bootstrap(fit, data.X, BootConfig(B=B, seed=8))
        centered = fit.centered_residuals
        pooled = draws.resample_counts @ centered / (n * B)
        bound = 3 * centered.std(axis=0) / np.sqrt(n * B)
        self.assertTrue(np.all(np.abs(pooled) < bound))

    def test_index_frequencies_are_uniform(self):
        n, B = 50, 2000
        data = simulated_dataset(seed=6, n=n)
        draws = residual_bootstrap(fit_ols(data), data.X, BootConfig(B=B, seed=21))
        self.assertEqual(int(draws.resample_counts.sum()), n * B)
        freq = draws.resample_counts / (n * B)
        band = 4 * np.sqrt((1 / n) * (1 - 1 / n) / (n * B))
        self.assertTrue(np.all(np.abs(freq - 1 / n) <= band))

    def test_design_shape_must_match_fit(self):
        data = simulated_dataset()
        with self.assertRaises(DimensionMismatch):
            residual_bootstrap(fit_ols(data), data.X[:10], BootConfig(B=10))


class PairsBootstrapTests(SimpleTestCase):
    def test_point_mass_cases(self):
        data = Dataset(np.full((6, 1), 2.0), np.tile([3.0, -1.0], (6, 1)))
        draws = pairs_bootstrap(data, BootConfig(B=25, seed=4))
        np.testing.assert_allclose(draws.draws, np.tile([1.5, -0.5], (25, 1)), atol=1e-14)
        np.testing.assert_allclose(draws.var_star, np.zeros((2, 2)), atol=1e-24)
        self.assertEqual(draws.redraws, 0)

    def test_two_case_enumeration(self):
        """Test resample frequencies of 1, 2 and 9/5 against 1/4, 1/4, 1/2 within 3 sigma"""
        B = 10_000
        data = Dataset([[1.0], [2.0]], [[1.0], [4.0]])
        values = pairs_bootstrap(data, BootConfig(B=B, seed=2024)).draws.ravel()
        for target, prob in ((1.0, 0.25), (2.0, 0.25), (9 / 5, 0.5)):
            count = np.sum(np.isclose(values, target, atol=1e-12))
            self.assertLessEqual(abs(count - B * prob), 3 * np.sqrt(B * prob * (1 - prob)))
        total = sum(np.sum(np.isclose(values, t, atol=1e-12)) for t in (1.0, 2.0, 9 / 5))
        self.assertEqual(total, B)

    def test_deterministic_across_thread_counts(self):
        data = simulated_dataset(n=40, p=3)
        cfg = BootConfig(B=73, seed=99)
        serial = pairs_bootstrap(data, cfg, threads=1)
        parallel = pairs_bootstrap(data, cfg, threads=8)
        np.testing.assert_array_equal(serial.draws, parallel.draws)
        np.testing.assert_array_equal(serial.design_moment_last, parallel.design_moment_last)

    def test_singular_resamples_are_redrawn(self):
        X = np.zeros((10, 1))
        X[0, 0] = 1.0
        data = Dataset(X, np.arange(10.0).reshape(-1, 1))
        draws = pairs_bootstrap(data, BootConfig(B=50, seed=1))
        self.assertGreater(draws.redraws, 0)
        self.assertTrue(np.all(draws.resample_counts[0] > 0))

    def test_exhausted_redraws_raise(self):
        X = np.zeros((10, 1))
        X[0, 0] = 1.0
        data = Dataset(X, np.arange(10.0).reshape(-1, 1))
        with self.assertRaises(SingularResamples):
            pairs_bootstrap(data, BootConfig(B=50, seed=1, max_redraws=0))

    def test_design_moment_of_last_replicate(self):
        data = simulated_dataset(n=30)
        draws = pairs_bootstrap(data, BootConfig(B=12, seed=3))
        self.assertEqual(draws.design_moment_last.shape, (2, 2))
        self.assertAlmostEqual(float(draws.design_moment_last[0, 0]), 1.0)
