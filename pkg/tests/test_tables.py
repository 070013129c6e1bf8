"""
Interval tables: bootstrap percentile intervals against closed-form
intervals, one generated dataset per sample size, B = 4n.

The tables are run over every component of vec(β), so with r = 3 and
p = 2 there are 12 component-endpoint series.
"""
import numpy as np
import pytest

from simulate.experiments import non_increasing_series, run_table_experiment

# one table run per seed; the mean gap per series is what shrinks with n
TREND_SEEDS = range(1, 13)


def mean_discrepancy(blocks):
    return {row.n: float(row.discrepancy().mean()) for row in blocks.rows}


def all_components(config):
    return config.r * config.p


def averaged_series(which, config):
    runs = [
        run_table_experiment(which, seed=seed, config=config, components=all_components(config)).endpoint_series()
        for seed in TREND_SEEDS
    ]
    return np.mean(runs, axis=0)


@pytest.mark.slow
class TestResidualTable:
    """Residual bootstrap vs normal-fixed intervals on the fixed design"""

    @pytest.fixture(scope="class")
    def blocks(self, experiment_config):
        return run_table_experiment('table1', config=experiment_config, components=all_components(experiment_config))

    def test_layout(self, blocks, experiment_config):
        assert [row.n for row in blocks.rows] == list(experiment_config.table_sizes)
        for row in blocks.rows:
            assert row.bootstrap.method == 'percentile'
            assert row.closed_form.method == 'normal-fixed'
            assert len(row.bootstrap) == 6
        assert blocks.endpoint_series().shape == (4, 12)

    def test_every_endpoint_agrees_at_largest_n(self, blocks):
        assert blocks.rows[-1].n == 5000
        assert np.all(blocks.rows[-1].endpoint_gaps() <= 0.01)

    def test_discrepancy_shrinks(self, blocks):
        discrepancy = mean_discrepancy(blocks)
        assert discrepancy[5000] < discrepancy[100]
        assert discrepancy[1000] < discrepancy[100]

    def test_endpoint_series_non_increasing(self, experiment_config):
        series = averaged_series('table1', experiment_config)
        assert series.shape == (4, 12)
        assert non_increasing_series(series) >= 10

    def test_intervals_narrow_with_n(self, blocks):
        widths = [row.closed_form.width.mean() for row in blocks.rows]
        assert widths == sorted(widths, reverse=True)


@pytest.mark.slow
class TestPairsTable:
    """Pairs bootstrap vs sandwich intervals on the joint design"""

    @pytest.fixture(scope="class")
    def blocks(self, experiment_config):
        return run_table_experiment('table2', config=experiment_config, components=all_components(experiment_config))

    def test_layout(self, blocks):
        for row in blocks.rows:
            assert row.bootstrap.method == 'percentile'
            assert row.closed_form.method == 'normal-sandwich'
            assert len(row.closed_form) == 6

    def test_every_endpoint_agrees_at_largest_n(self, blocks):
        assert blocks.rows[-1].n == 5000
        assert np.all(blocks.rows[-1].endpoint_gaps() <= 0.02)

    def test_discrepancy_shrinks(self, blocks):
        discrepancy = mean_discrepancy(blocks)
        assert discrepancy[5000] < discrepancy[100]


def test_small_table_is_reproducible(experiment_config):
    first = run_table_experiment('table1', sizes=(60,), seed=3, config=experiment_config)
    second = run_table_experiment('table1', sizes=(60,), seed=3, config=experiment_config)
    np.testing.assert_array_equal(first.rows[0].bootstrap.lower, second.rows[0].bootstrap.lower)
    assert first.config['version'] == 1


def test_default_table_keeps_leading_components(experiment_config):
    blocks = run_table_experiment('table1', sizes=(60,), seed=3, config=experiment_config)
    full = run_table_experiment('table1', sizes=(60,), seed=3, config=experiment_config, components=6)
    k = experiment_config.table_components
    assert len(blocks.rows[0].bootstrap) == k
    np.testing.assert_array_equal(blocks.rows[0].bootstrap.lower, full.rows[0].bootstrap.lower[:k])


def test_non_increasing_series_counts_columns():
    series = np.array([[3.0, 1.0, 2.0], [2.0, 1.0, 3.0], [1.0, 0.5, 1.0]])
    assert non_increasing_series(series) == 2
