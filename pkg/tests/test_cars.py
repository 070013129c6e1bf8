"""
The 32-car Motor Trend data through the command line.
"""
import json
from io import StringIO

import numpy as np
import pytest
from django.core.management import call_command

from cli.ingest import ingest_csv
from regression.ols import fit_ols

RESPONSES = ['mpg', 'disp', 'hp']
FACTORS = ['cyl', 'am']


def run_command(name, **options):
    out = StringIO()
    call_command(name, stdout=out, **options)
    return out.getvalue()


@pytest.fixture(scope="module")
def cars(cars_csv):
    return ingest_csv(cars_csv, RESPONSES, FACTORS, FACTORS)


@pytest.fixture(scope="module")
def boot_fixed(cars_csv):
    text = run_command('boot_fixed', input=cars_csv, responses=','.join(RESPONSES), predictors=','.join(FACTORS),
                       factors=','.join(FACTORS), B=128, seed=2024, format='json')
    return json.loads(text)


def test_dimensions(cars):
    assert (cars.n, cars.p, cars.r) == (32, 4, 3)


def test_fit_matches_normal_equations(cars):
    expected = np.linalg.solve(cars.X.T @ cars.X, cars.X.T @ cars.Y).T
    np.testing.assert_allclose(fit_ols(cars).beta_hat, expected, rtol=1e-10, atol=1e-10)


def test_every_component_is_labelled(boot_fixed, cars):
    for intervals in boot_fixed['intervals']:
        assert [c['label'] for c in intervals['components']] == list(cars.labels)


def test_intervals_contain_point_estimates(boot_fixed, cars):
    point = fit_ols(cars).vec_beta
    for intervals in boot_fixed['intervals']:
        for component, estimate in zip(intervals['components'], point):
            assert component['lower'] - 1e-3 <= estimate <= component['upper'] + 1e-3


def test_bootstrap_and_normal_intervals_overlap(boot_fixed):
    percentile, normal = boot_fixed['intervals']
    for a, b in zip(percentile['components'], normal['components']):
        assert max(a['lower'], b['lower']) <= min(a['upper'], b['upper'])
