"""
The command pipeline: ingest, fit, optionally bootstrap, build intervals, emit.
"""
import logging

import numpy as np

from asymptotics.normal_theory import fixed_design_intervals
from asymptotics.sandwich import sandwich_intervals, sandwich_parts
from bootstrap.engines import pairs_bootstrap, residual_bootstrap
from bootstrap.intervals import percentile_interval
from bootstrap.structures import BootConfig
from core.exceptions import InvalidConfiguration, MvbootError
from core.streams import child_generator, derive_seed
from mallows.bounds import check_lemma6, check_lemma_bounds, check_theorem3_bound
from regression.ols import fit_ols
from simulate.experiments import coverage_study, run_table_experiment
from simulate.specs import FixedDesignSpec, JointDesignSpec, load_experiment_config

from . import reports
from .ingest import ingest_csv

logger = logging.getLogger(__name__)

COVERAGE_DEFAULTS = {'n': 100, 'reps': 200}
CHECK_DEFAULTS = {
    'theorem3': {'n': 8, 'trials': 1},
    'lemmas': {'n': 50, 'trials': 200},
    'lemma6': {'n': 20, 'trials': 1},
}
CHECK_DIMENSIONS = {'p': 2, 'r': 2}
JOINT_METHODS = ('pairs', 'normal-sandwich')


def _ingest(cfg):
    return ingest_csv(cfg.input, cfg.responses, cfg.predictors, cfg.factors, cfg.intercept)


def _boot_config(cfg):
    return BootConfig(B=cfg.B, seed=cfg.seed or 0, alpha=cfg.alpha)


def run_fit(cfg):
    data = _ingest(cfg)
    return reports.fit_report(data, fit_ols(data), cfg.as_dict())


def run_boot_fixed(cfg):
    data = _ingest(cfg)
    fit = fit_ols(data)
    draws = residual_bootstrap(fit, data.X, _boot_config(cfg))
    alpha = draws.config.alpha
    tables = [percentile_interval(draws, alpha), fixed_design_intervals(fit, alpha)]
    return reports.bootstrap_report('boot-fixed', data, draws, tables, cfg.as_dict())


def run_boot_pairs(cfg):
    data = _ingest(cfg)
    fit = fit_ols(data)
    draws = pairs_bootstrap(data, _boot_config(cfg))
    alpha = draws.config.alpha
    tables = [percentile_interval(draws, alpha), sandwich_intervals(sandwich_parts(data, fit), fit, alpha)]
    return reports.bootstrap_report('boot-pairs', data, draws, tables, cfg.as_dict())


def run_simulate(cfg):
    config = load_experiment_config(cfg.config or None)
    if cfg.experiment != 'coverage':
        blocks = run_table_experiment(cfg.experiment, sizes=cfg.sizes or None, seed=cfg.seed, config=config,
                                      alpha=cfg.alpha)
        return reports.table_experiment_report(blocks)

    method = cfg.method or 'residual'
    n = cfg.n or COVERAGE_DEFAULTS['n']
    seed = config.seed if cfg.seed is None else cfg.seed
    design = JointDesignSpec if method in JOINT_METHODS else FixedDesignSpec
    spec = design.from_config(config, n, derive_seed(seed, n, 0))
    report = coverage_study(spec, method, cfg.reps or COVERAGE_DEFAULTS['reps'], alpha=cfg.alpha or config.alpha,
                            seed=seed, B=cfg.B)
    return reports.coverage_report(report, config.as_dict())


def _check_instance(cfg):
    defaults = CHECK_DEFAULTS[cfg.check]
    return {
        'n': cfg.n or defaults['n'],
        'p': cfg.p or CHECK_DIMENSIONS['p'],
        'r': cfg.r or CHECK_DIMENSIONS['r'],
        'trials': cfg.trials or defaults['trials'],
        'seed': cfg.seed or 0,
    }


def run_mallows_check(cfg):
    """
    Bound checks on random instances built from the seed: standard normal
    designs, centered Gaussian atom sets, identity error covariance.
    """
    instance = _check_instance(cfg)
    n, p, r, trials, seed = (instance[k] for k in ('n', 'p', 'r', 'trials', 'seed'))
    rng = child_generator(derive_seed(seed, 0))
    if cfg.check == 'theorem3':
        X = rng.standard_normal((n, p))
        F = rng.standard_normal((n, r))
        G = 1.5 * rng.standard_normal((n, r))
        found = [check_theorem3_bound(X, F - F.mean(axis=0), G - G.mean(axis=0), trials=trials, seed=seed)]
    elif cfg.check == 'lemmas':
        spec = FixedDesignSpec(n=n, beta=rng.standard_normal((r, p)), sigma=np.eye(r), seed=seed)
        lemmas = check_lemma_bounds(spec, reps=trials)
        found = [lemmas.residual, lemmas.centered]
    elif cfg.check == 'lemma6':
        found = [check_lemma6(*rng.standard_normal((2, n, r))) for _ in range(trials)]
    else:
        raise InvalidConfiguration(f"unknown check '{cfg.check}'")
    return reports.bounds_report(cfg.check, found, instance)


HANDLERS = {
    'fit': run_fit,
    'boot-fixed': run_boot_fixed,
    'boot-pairs': run_boot_pairs,
    'simulate': run_simulate,
    'mallows-check': run_mallows_check,
}


def run(cfg):
    """
    Execute one subcommand. Returns (exit status, report text); on failure
    the text is a single JSON error line and the status its family code.
    """
    try:
        try:
            handler = HANDLERS[cfg.subcommand]
        except KeyError:
            raise InvalidConfiguration(f"unknown subcommand '{cfg.subcommand}'")
        payload, table = handler(cfg)
    except MvbootError as exc:
        logger.error(f"{cfg.subcommand} failed: {exc.code}: {exc}")
        return exc.exit_code, reports.error_line(exc)
    logger.info(f"{cfg.subcommand} finished")
    return 0, reports.to_json(payload) if cfg.format == 'json' else table
