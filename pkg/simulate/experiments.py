"""
Experiment drivers: one dataset per sample size for the interval tables,
many independent datasets for coverage studies.
"""
import logging
from dataclasses import dataclass

import numpy as np

from asymptotics.normal_theory import fixed_design_intervals
from asymptotics.sandwich import sandwich_intervals, sandwich_parts
from bootstrap.engines import pairs_bootstrap, residual_bootstrap
from bootstrap.intervals import percentile_interval
from bootstrap.structures import BootConfig
from core.exceptions import InvalidConfiguration
from core.streams import derive_seed, run_chunked
from regression.ols import fit_ols
from tensorlinalg.operators import vec

from .generators import gen_fixed, gen_joint, joint_estimand
from .specs import CoverageReport, FixedDesignSpec, JointDesignSpec, load_experiment_config

logger = logging.getLogger(__name__)

TABLES = {
    'table1': ('residual', 'normal-fixed'),
    'table2': ('pairs', 'normal-sandwich'),
}
COVERAGE_METHODS = ('residual', 'pairs', 'normal-fixed', 'normal-sandwich')


@dataclass(frozen=True)
class TableRow:
    n: int
    bootstrap: object
    closed_form: object

    def endpoint_gaps(self):
        """Absolute endpoint gaps between the two methods, shape (components, 2)."""
        return np.column_stack([
            np.abs(self.bootstrap.lower - self.closed_form.lower),
            np.abs(self.bootstrap.upper - self.closed_form.upper),
        ])

    def discrepancy(self):
        """Largest endpoint gap between the two methods, per component."""
        return self.endpoint_gaps().max(axis=1)


@dataclass(frozen=True)
class TableBlocks:
    which: str
    rows: tuple
    config: dict
    seed: int

    @property
    def methods(self):
        return TABLES[self.which]

    def endpoint_series(self):
        """
        Endpoint gaps by sample size: one row per n, one column per
        component endpoint (lower, upper, lower, upper, ...).
        """
        return np.vstack([row.endpoint_gaps().ravel() for row in self.rows])


def non_increasing_series(series):
    """Number of columns of an (n-sizes x series) array that never grow with n."""
    series = np.asarray(series, dtype=float)
    return int(np.all(np.diff(series, axis=0) <= 0, axis=0).sum())


def _table_row(which, config, n, seed, alpha, threads, k):
    data_seed = derive_seed(seed, n, 0)
    boot = BootConfig(seed=derive_seed(seed, n, 1), alpha=alpha)
    if which == 'table1':
        data = gen_fixed(FixedDesignSpec.from_config(config, n, data_seed))
        fit = fit_ols(data)
        draws = residual_bootstrap(fit, data.X, boot, threads=threads)
        closed = fixed_design_intervals(fit, alpha)
    else:
        data = gen_joint(JointDesignSpec.from_config(config, n, data_seed))
        fit = fit_ols(data)
        draws = pairs_bootstrap(data, boot, threads=threads)
        closed = sandwich_intervals(sandwich_parts(data, fit), fit, alpha)
    return TableRow(n=n, bootstrap=percentile_interval(draws, alpha).select(k), closed_form=closed.select(k))


def run_table_experiment(which, sizes=None, seed=None, config=None, alpha=None, threads=None, components=None):
    """
    Bootstrap percentile intervals against closed-form intervals, one
    generated dataset per sample size, B = 4n.

    ``table1`` pairs the residual bootstrap with normal-fixed intervals on the
    fixed design; ``table2`` pairs the pairs bootstrap with sandwich
    intervals on the joint design.

    ``components`` overrides how many leading components of vec(β) are kept
    (``table_components`` in the generator file).
    """
    if which not in TABLES:
        raise InvalidConfiguration(f"unknown table '{which}', expected one of {tuple(TABLES)}")
    config = config or load_experiment_config()
    sizes = tuple(sizes or config.table_sizes)
    seed = config.seed if seed is None else seed
    alpha = config.alpha if alpha is None else alpha
    k = config.table_components if components is None else int(components)
    if not 1 <= k <= config.r * config.p:
        raise InvalidConfiguration(f"components must lie in [1, {config.r * config.p}], got {k}")
    rows = []
    for n in sizes:
        logger.info(f"{which}: n={n}, B={4 * n}")
        rows.append(_table_row(which, config, int(n), seed, alpha, threads, k))
    return TableBlocks(which=which, rows=tuple(rows), config=config.as_dict(), seed=seed)


def _intervals_for(method, data, alpha, boot_seed, B):
    fit = fit_ols(data)
    if method == 'normal-fixed':
        return fixed_design_intervals(fit, alpha)
    if method == 'normal-sandwich':
        return sandwich_intervals(sandwich_parts(data, fit), fit, alpha)
    cfg = BootConfig(B=B, seed=boot_seed, alpha=alpha)
    if method == 'residual':
        draws = residual_bootstrap(fit, data.X, cfg, threads=1)
    else:
        draws = pairs_bootstrap(data, cfg, threads=1)
    return percentile_interval(draws, alpha)


def coverage_study(spec, method, reps, alpha=None, seed=0, B=None, threads=None):
    """
    Fraction of ``reps`` independent generate-fit-interval runs whose interval
    covers the estimand, per vec(β) component.

    The estimand is ``spec.beta`` for a FixedDesignSpec and β(μ) for a
    JointDesignSpec. Repetitions run in parallel; each bootstrap inside a
    repetition runs serially.
    """
    if method not in COVERAGE_METHODS:
        raise InvalidConfiguration(f"unknown coverage method '{method}', expected one of {COVERAGE_METHODS}")
    if reps < 1:
        raise InvalidConfiguration(f"reps must be positive, got {reps}")
    if reps < 100:
        logger.warning(f"Coverage study with only {reps} repetitions")
    alpha = BootConfig(alpha=alpha).alpha
    if isinstance(spec, JointDesignSpec):
        estimand = vec(joint_estimand(spec))

        def generate(k):
            return gen_joint(spec, replicate=k)
    elif isinstance(spec, FixedDesignSpec):
        estimand = vec(spec.beta)

        def generate(k):
            return gen_fixed(spec, error_index=k)
    else:
        raise InvalidConfiguration(f"cannot run a coverage study on {type(spec).__name__}")

    def worker(start, stop):
        hits = np.zeros((stop - start, estimand.size), dtype=bool)
        widths = np.zeros((stop - start, estimand.size))
        labels = ()
        for offset, k in enumerate(range(start, stop)):
            table = _intervals_for(method, generate(k), alpha, derive_seed(seed, k), B)
            hits[offset] = table.covers(estimand)
            widths[offset] = table.width
            labels = table.labels
        return hits, widths, labels

    logger.info(f"Coverage study: method={method}, n={spec.n}, reps={reps}")
    chunks = run_chunked(worker, reps, threads)
    hits = np.concatenate([chunk[0] for chunk in chunks])
    widths = np.concatenate([chunk[1] for chunk in chunks])
    return CoverageReport(
        method=method,
        labels=chunks[0][2],
        coverage=hits.mean(axis=0),
        mean_width=widths.mean(axis=0),
        reps=reps,
        alpha=alpha,
        n=spec.n,
        seed=seed,
    )
