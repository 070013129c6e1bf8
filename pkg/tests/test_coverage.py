"""
Coverage of the interval procedures over independent generated datasets.
"""
import numpy as np
import pytest

from simulate.experiments import coverage_study
from simulate.specs import FixedDesignSpec, JointDesignSpec

NOMINAL_BAND = (0.92, 0.975)


@pytest.mark.slow
def test_residual_bootstrap_coverage(experiment_config):
    spec = FixedDesignSpec.from_config(experiment_config, n=500, seed=101)
    report = coverage_study(spec, 'residual', reps=500, alpha=0.05, seed=7, B=2000)
    assert np.all(report.coverage >= NOMINAL_BAND[0])
    assert np.all(report.coverage <= NOMINAL_BAND[1])


@pytest.mark.slow
def test_pairs_bootstrap_coverage_of_estimand(experiment_config):
    spec = JointDesignSpec.from_config(experiment_config, n=500, seed=202)
    report = coverage_study(spec, 'pairs', reps=500, alpha=0.05, seed=8, B=2000)
    assert np.all(report.coverage >= NOMINAL_BAND[0])
    assert np.all(report.coverage <= NOMINAL_BAND[1])


@pytest.mark.parametrize('method', ['normal-fixed', 'normal-sandwich'])
def test_closed_form_coverage(experiment_config, method):
    design = FixedDesignSpec if method == 'normal-fixed' else JointDesignSpec
    spec = design.from_config(experiment_config, n=300, seed=303)
    report = coverage_study(spec, method, reps=400, alpha=0.05, seed=9)
    # 400 reps: a 0.95 frequency has standard error about 0.011
    assert np.all(report.coverage >= 0.91)
    assert np.all(report.coverage <= 0.985)


def test_half_coverage_at_alpha_one_half(experiment_config):
    spec = FixedDesignSpec.from_config(experiment_config, n=200, seed=404)
    report = coverage_study(spec, 'normal-fixed', reps=300, alpha=0.5, seed=10)
    assert 0.44 <= report.coverage.mean() <= 0.56


def test_widths_shrink_like_root_n(experiment_config):
    widths = {}
    for n in (500, 2000):
        spec = FixedDesignSpec.from_config(experiment_config, n=n, seed=505)
        widths[n] = coverage_study(spec, 'normal-fixed', reps=50, seed=11).mean_width
    ratio = widths[500] / widths[2000]
    assert np.all((ratio > 1.8) & (ratio < 2.2))
