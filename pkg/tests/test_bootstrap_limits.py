"""
Large-sample behaviour of the two bootstrap engines: replicate covariance,
Σ̂* consistency and normality of the standardized pivot.
"""
import numpy as np
import pytest
from scipy import stats

from asymptotics.normal_theory import fixed_design_covariance, fixed_design_intervals, pivot_statistics
from asymptotics.sandwich import sandwich_parts
from bootstrap.engines import pairs_bootstrap, residual_bootstrap
from bootstrap.intervals import percentile_interval
from bootstrap.structures import BootConfig
from regression.ols import fit_ols
from simulate.generators import gen_fixed, gen_joint, joint_residual_covariance
from simulate.specs import FixedDesignSpec, JointDesignSpec


def relative_frobenius(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


@pytest.mark.slow
class TestResidualBootstrapLimits:
    @pytest.fixture(scope="class")
    def run(self, experiment_config):
        data = gen_fixed(FixedDesignSpec.from_config(experiment_config, n=2000, seed=31))
        fit = fit_ols(data)
        draws = residual_bootstrap(fit, data.X, BootConfig(B=4000, seed=32))
        return fit, draws

    def test_pivot_marginals_are_standard_normal(self, run):
        fit, draws = run
        pivots = pivot_statistics(fit, draws)
        for column in pivots.T:
            assert stats.kstest(column, 'norm').pvalue > 0.01

    def test_pivot_covariance_is_near_identity(self, run):
        fit, draws = run
        diagonal = np.diag(np.cov(pivot_statistics(fit, draws), rowvar=False))
        assert np.all((diagonal > 0.9) & (diagonal < 1.1))

    def test_replicate_covariance_matches_kronecker_form(self, run):
        fit, draws = run
        ratio = np.diag(draws.var_star) / np.diag(fixed_design_covariance(fit))
        # B = 4000: a variance estimate has relative sd about 2%
        assert np.all(np.abs(ratio - 1.0) < 0.1)


@pytest.mark.slow
def test_residual_sigma_star_is_consistent(experiment_config):
    spec = FixedDesignSpec.from_config(experiment_config, n=5000, seed=41)
    data = gen_fixed(spec)
    draws = residual_bootstrap(fit_ols(data), data.X, BootConfig(B=200, seed=42))
    assert relative_frobenius(draws.sigma_star_last, spec.sigma) <= 0.1


@pytest.mark.slow
def test_pairs_sigma_star_is_consistent(experiment_config):
    spec = JointDesignSpec.from_config(experiment_config, n=5000, seed=43)
    draws = pairs_bootstrap(gen_joint(spec), BootConfig(B=200, seed=44))
    assert relative_frobenius(draws.sigma_star_last, joint_residual_covariance(spec)) <= 0.1
    assert relative_frobenius(draws.design_moment_last, spec.sigma_x) <= 0.1


@pytest.mark.slow
def test_pairs_covariance_matches_sandwich(experiment_config):
    spec = JointDesignSpec.from_config(experiment_config, n=1000, seed=51)
    data = gen_joint(spec)
    fit = fit_ols(data)
    draws = pairs_bootstrap(data, BootConfig(B=4000, seed=52))
    ratio = np.diag(draws.var_star) / np.diag(sandwich_parts(data, fit).covariance)
    assert np.all(np.abs(ratio - 1.0) < 0.15)


def test_percentile_width_tracks_normal_width(experiment_config):
    data = gen_fixed(FixedDesignSpec.from_config(experiment_config, n=500, seed=61))
    fit = fit_ols(data)
    draws = residual_bootstrap(fit, data.X, BootConfig(seed=62))
    ratio = percentile_interval(draws).width / fixed_design_intervals(fit).width
    assert np.all(np.abs(ratio - 1.0) < 0.1)
