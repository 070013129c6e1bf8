import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from bootstrap.engines import pairs_bootstrap
from bootstrap.structures import BootConfig
from core.exceptions import BlockNotSPD, InvalidConfiguration
from regression.ols import fit_ols
from simulate.experiments import coverage_study, run_table_experiment
from simulate.generators import (
    fixed_design_sample,
    gen_fixed,
    gen_joint,
    joint_estimand,
    joint_residual_covariance,
)
from simulate.specs import FixedDesignSpec, JointDesignSpec, load_experiment_config

BETA = np.array([[0.6, 0.05], [-0.3, 0.8], [0.2, -0.5]])
SIGMA = np.full((3, 3), 0.3) + 0.7 * np.eye(3)


def relative_frobenius(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


class ExperimentConfigTests(SimpleTestCase):
    def test_shipped_defaults(self):
        config = load_experiment_config()
        self.assertEqual(config.version, 1)
        self.assertEqual((config.r, config.p), (3, 2))
        np.testing.assert_array_equal(config.sigma, SIGMA)
        np.testing.assert_array_equal(config.sigma_x_eps, np.full((2, 3), 0.2))
        self.assertTrue(np.all(np.abs(config.beta) <= 1))
        self.assertEqual(config.error_law, 'gaussian')
        self.assertEqual(config.table_sizes, (100, 500, 1000, 5000))

    def test_echo_includes_source_and_version(self):
        echo = load_experiment_config().as_dict()
        self.assertEqual(echo['version'], 1)
        self.assertTrue(echo['source'].endswith('defaults.yaml'))

    def write_config(self, text):
        directory = tempfile.TemporaryDirectory()
        self.addCleanup(directory.cleanup)
        path = Path(directory.name) / 'experiment.yaml'
        path.write_text(text, encoding='utf-8')
        return path

    def test_unknown_key_is_rejected(self):
        path = self.write_config("version: 2\nr: 1\np: 1\nbeta: [[1.0]]\nsigma_diagnal: 2.0\n")
        with self.assertRaises(InvalidConfiguration):
            load_experiment_config(path)

    def test_version_is_required(self):
        path = self.write_config("r: 1\np: 1\nbeta: [[1.0]]\n")
        with self.assertRaises(InvalidConfiguration):
            load_experiment_config(path)

    def test_heavy_tailed_law_needs_fourth_moment(self):
        path = self.write_config("version: 3\nr: 1\np: 1\nbeta: [[1.0]]\nerror_law: student_t\nstudent_t_df: 3\n")
        with self.assertRaises(InvalidConfiguration):
            load_experiment_config(path)

    def test_missing_file(self):
        with self.assertRaises(InvalidConfiguration):
            load_experiment_config('/nonexistent/experiment.yaml')


class FixedGeneratorTests(SimpleTestCase):
    def test_zero_noise_gives_exact_responses(self):
        spec = FixedDesignSpec(n=20, beta=BETA, sigma=np.zeros((3, 3)), seed=1)
        data = gen_fixed(spec)
        np.testing.assert_array_equal(data.Y, data.X @ BETA.T)

    def test_same_seed_is_bitwise_reproducible(self):
        spec = FixedDesignSpec(n=50, beta=BETA, sigma=SIGMA, seed=7)
        first, second = gen_fixed(spec), gen_fixed(spec)
        np.testing.assert_array_equal(first.X, second.X)
        np.testing.assert_array_equal(first.Y, second.Y)

    def test_new_error_index_redraws_errors_only(self):
        spec = FixedDesignSpec(n=50, beta=BETA, sigma=SIGMA, seed=7)
        first, second = gen_fixed(spec, error_index=0), gen_fixed(spec, error_index=1)
        np.testing.assert_array_equal(first.X, second.X)
        self.assertFalse(np.array_equal(first.Y, second.Y))

    def test_error_covariance_at_large_n(self):
        _, errors = fixed_design_sample(FixedDesignSpec(n=100_000, beta=BETA, sigma=SIGMA, seed=3))
        self.assertLess(relative_frobenius(np.cov(errors, rowvar=False, bias=True), SIGMA), 0.02)

    def test_non_gaussian_laws_keep_covariance(self):
        for law in ('student_t', 'uniform'):
            with self.subTest(law=law):
                spec = FixedDesignSpec(n=100_000, beta=BETA, sigma=SIGMA, seed=4, error_law=law)
                _, errors = fixed_design_sample(spec)
                self.assertLess(relative_frobenius(np.cov(errors, rowvar=False), SIGMA), 0.05)

    def test_fit_recovers_beta(self):
        fit = fit_ols(gen_fixed(FixedDesignSpec(n=5000, beta=BETA, sigma=SIGMA, seed=5)))
        self.assertLess(np.max(np.abs(fit.beta_hat - BETA)), 0.05)

    def test_rejects_indefinite_sigma(self):
        with self.assertRaises(InvalidConfiguration):
            FixedDesignSpec(n=10, beta=BETA, sigma=-np.eye(3))


class JointGeneratorTests(SimpleTestCase):
    def spec(self, n, cross=0.2, seed=0):
        return JointDesignSpec(
            n=n, beta=BETA, sigma_x=np.eye(2), sigma_x_eps=np.full((2, 3), cross), sigma=SIGMA, seed=seed
        )

    def test_uncorrelated_blocks_target_generating_beta(self):
        spec = self.spec(5000, cross=0.0, seed=2)
        np.testing.assert_array_equal(joint_estimand(spec), BETA)
        fit = fit_ols(gen_joint(spec))
        self.assertLess(np.max(np.abs(fit.beta_hat - BETA)), 0.05)

    def test_estimand_matches_large_sample_fit(self):
        """Test the closed-form estimand against OLS on a million draws"""
        spec = self.spec(1_000_000, seed=3)
        np.testing.assert_allclose(joint_estimand(spec), BETA + 0.2, atol=1e-15)
        fit = fit_ols(gen_joint(spec))
        self.assertLess(np.max(np.abs(fit.beta_hat - joint_estimand(spec))), 0.01)
        self.assertLess(relative_frobenius(fit.sigma_hat, joint_residual_covariance(spec)), 0.01)

    def test_block_must_be_positive_definite(self):
        with self.assertRaises(BlockNotSPD):
            self.spec(100, cross=0.9)

    def test_replicates_differ(self):
        spec = self.spec(30)
        self.assertFalse(np.array_equal(gen_joint(spec, 0).X, gen_joint(spec, 1).X))
        np.testing.assert_array_equal(gen_joint(spec, 1).Y, gen_joint(spec, 1).Y)

    def test_copies_of_one_case_have_constant_resamples(self):
        spec = JointDesignSpec(
            n=30, beta=BETA[:, :1], sigma_x=[[1.0]], sigma_x_eps=np.full((1, 3), 0.2), sigma=SIGMA, seed=6
        )
        data = gen_joint(spec)
        copies = data.take(np.zeros(30, dtype=int))
        draws = pairs_bootstrap(copies, BootConfig(B=20, seed=1))
        expected = data.Y[0] * data.X[0, 0] / data.X[0, 0] ** 2
        np.testing.assert_allclose(draws.draws, np.tile(expected, (20, 1)), rtol=1e-12)


class TableExperimentTests(SimpleTestCase):
    def test_table_layout(self):
        blocks = run_table_experiment('table1', sizes=[60], seed=3)
        self.assertEqual(len(blocks.rows), 1)
        row = blocks.rows[0]
        self.assertEqual(row.n, 60)
        self.assertEqual(row.bootstrap.labels, ('y1:x1', 'y2:x1'))
        self.assertEqual(row.bootstrap.method, 'percentile')
        self.assertEqual(row.closed_form.method, 'normal-fixed')
        self.assertEqual(blocks.config['version'], 1)

    def test_table2_uses_sandwich(self):
        blocks = run_table_experiment('table2', sizes=[80], seed=3)
        self.assertEqual(blocks.rows[0].closed_form.method, 'normal-sandwich')
        self.assertEqual(blocks.methods, ('pairs', 'normal-sandwich'))

    def test_same_seed_same_table(self):
        first = run_table_experiment('table1', sizes=[40], seed=9)
        second = run_table_experiment('table1', sizes=[40], seed=9, threads=4)
        np.testing.assert_array_equal(first.rows[0].bootstrap.lower, second.rows[0].bootstrap.lower)

    def test_unknown_table(self):
        with self.assertRaises(InvalidConfiguration):
            run_table_experiment('table9')

    def test_all_components_give_twelve_series(self):
        blocks = run_table_experiment('table1', sizes=[40, 60], seed=9, components=6)
        self.assertEqual(blocks.rows[0].bootstrap.labels[-1], 'y3:x2')
        self.assertEqual(blocks.endpoint_series().shape, (2, 12))
        np.testing.assert_array_equal(blocks.rows[1].discrepancy(), blocks.rows[1].endpoint_gaps().max(axis=1))

    def test_component_count_out_of_range(self):
        with self.assertRaises(InvalidConfiguration):
            run_table_experiment('table1', sizes=[40], seed=9, components=7)


class CoverageStudyTests(SimpleTestCase):
    def test_zero_noise_covers_always(self):
        spec = FixedDesignSpec(n=30, beta=BETA, sigma=np.zeros((3, 3)), seed=2)
        for method in ('residual', 'pairs', 'normal-fixed', 'normal-sandwich'):
            with self.subTest(method=method):
                report = coverage_study(spec, method, reps=8, B=40, seed=1)
                np.testing.assert_array_equal(report.coverage, np.ones(6))

    def test_report_shape_and_determinism(self):
        spec = FixedDesignSpec(n=40, beta=BETA, sigma=SIGMA, seed=2)
        first = coverage_study(spec, 'residual', reps=12, B=40, seed=5, threads=1)
        second = coverage_study(spec, 'residual', reps=12, B=40, seed=5, threads=6)
        np.testing.assert_array_equal(first.coverage, second.coverage)
        np.testing.assert_array_equal(first.mean_width, second.mean_width)
        self.assertEqual(len(first.to_dict()['components']), 6)
        self.assertTrue(np.all(first.mean_width > 0))

    def test_joint_spec_is_scored_against_estimand(self):
        spec = JointDesignSpec(
            n=200, beta=BETA, sigma_x=np.eye(2), sigma_x_eps=np.full((2, 3), 0.2), sigma=SIGMA, seed=4
        )
        report = coverage_study(spec, 'normal-sandwich', reps=40, seed=2)
        self.assertGreater(report.coverage.mean(), 0.8)

    def test_unknown_method(self):
        spec = FixedDesignSpec(n=30, beta=BETA, sigma=SIGMA)
        with self.assertRaises(InvalidConfiguration):
            coverage_study(spec, 'wild', reps=10)
