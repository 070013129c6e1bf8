"""
Executable checks of the finite-sample Mallows bounds.

- ``check_theorem3_bound``: d₂(Ψ_n(F), Ψ_n(G))² ≤ n·r·tr{(𝕏ᵀ𝕏)^{-1}}·d₂(F, G)²
  for the law Ψ_n of √n·vec(εᵀ𝕏(𝕏ᵀ𝕏)^{-1}), estimated from s-point clouds.
- ``check_lemma_bounds``: the squared mean distance between residual and
  true-error empiricals against p·tr(Σ)/n, and its centered version against
  (p + 1)·tr(Σ)/n.
- ``check_lemma6``: ‖s_u² - s_v²‖_F² ≤ ‖m^{-1}Σ(u_i - v_i)(u_i - v_i)ᵀ‖_F².

Every report's ``slack`` is the absolute allowance added to the bound.
"""
import json
import logging
from dataclasses import dataclass, replace

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

from core.exceptions import DimensionMismatch, InvalidConfiguration
from core.streams import child_generator, run_chunked, validate_seed
from regression.ols import fit_ols
from simulate.generators import fixed_design_sample
from tensorlinalg.operators import as_matrix
from tensorlinalg.spd import SpdMat

from .distance import EmpiricalDist, mallows_distance, optimal_assignment

logger = logging.getLogger(__name__)

CLOUD_SIZE = 256
THEOREM3_SLACK = 0.15
LEMMA6_TOLERANCE = 1e-12
# rounding floor for degenerate (zero-variance) checks
ZERO_FLOOR = 1e-12


@dataclass(frozen=True)
class BoundReport:
    estimate: float
    bound: float
    slack: float
    passed: bool
    trials: int
    seed: int = None
    check: str = ''

    def to_dict(self):
        return {
            'estimate': self.estimate,
            'bound': self.bound,
            'slack': self.slack,
            'pass': self.passed,
            'trials': self.trials,
            'seed': self.seed,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), cls=DjangoJSONEncoder)


@dataclass(frozen=True)
class LemmaBoundReport:
    residual: BoundReport
    centered: BoundReport

    @property
    def passed(self):
        return self.residual.passed and self.centered.passed

    def to_dict(self):
        return {'residual': self.residual.to_dict(), 'centered': self.centered.to_dict(), 'pass': self.passed}


def _report(estimate, bound, slack, trials, seed, check):
    estimate, bound, slack = float(estimate), float(bound), float(slack)
    return BoundReport(
        estimate=estimate,
        bound=bound,
        slack=slack,
        passed=bool(estimate <= bound + slack + ZERO_FLOOR),
        trials=trials,
        seed=seed,
        check=check,
    )


def estimator_cloud(errors, projector):
    """√n·vec(εᵀ𝕏(𝕏ᵀ𝕏)^{-1}) for a stack of s error matrices (s×n×r)."""
    s, n, r = errors.shape
    mapped = np.sqrt(n) * np.einsum('snr,np->spr', errors, projector)
    # (s, p, r) row-major equals vec of the r×p matrix
    return mapped.reshape(s, -1)


def check_theorem3_bound(X, F, G, trials=1, seed=0, samples=CLOUD_SIZE, slack=THEOREM3_SLACK, threads=None):
    """
    Compare the empirical squared d₂ between s-point clouds of Ψ_n(F) and
    Ψ_n(G) with the bound, averaged over ``trials`` independent cloud pairs.

    Cloud pairs share random numbers: each F-draw picks atom indices and the
    G-draw uses the same indices pushed through the optimal F→G pairing.
    """
    X = as_matrix(X, 'X')
    F = F if isinstance(F, EmpiricalDist) else EmpiricalDist(F)
    G = G if isinstance(G, EmpiricalDist) else EmpiricalDist(G)
    seed = validate_seed(seed)
    if trials < 1:
        raise InvalidConfiguration(f"trials must be positive, got {trials}")
    for name, law in (('F', F), ('G', G)):
        if np.max(np.abs(law.mean)) > 1e-8 * max(1.0, float(np.max(np.abs(law.points)))):
            logger.warning(f"{name} is not mean-zero; the bound assumes centered error laws")

    n = X.shape[0]
    xtx = SpdMat(X.T @ X, name="X'X")
    projector = xtx.solve(X.T).T
    pairing, total = optimal_assignment(F, G, 2)
    law_distance_sq = total / F.m
    bound = n * F.k * float(np.trace(xtx.inverse().matrix)) * law_distance_sq

    def worker(start, stop):
        estimates = []
        for t in range(start, stop):
            atoms = child_generator(seed, t).integers(0, F.m, size=(samples, n))
            cloud_f = estimator_cloud(F.points[atoms], projector)
            cloud_g = estimator_cloud(G.points[pairing[atoms]], projector)
            estimates.append(mallows_distance(cloud_f, cloud_g, 2) ** 2)
        return estimates

    estimates = [e for chunk in run_chunked(worker, trials, threads) for e in chunk]
    estimate = float(np.mean(estimates))
    logger.info(f"Coefficient-law bound check: estimate={estimate:.4g}, bound={bound:.4g}")
    return _report(estimate, bound, slack * bound, trials, seed, 'theorem3')


def _lemma_distances(spec, rep):
    data, errors = fixed_design_sample(spec, error_index=rep)
    fit = fit_ols(data)
    truth = EmpiricalDist(errors)
    return (
        mallows_distance(EmpiricalDist(fit.residuals), truth, 2),
        mallows_distance(EmpiricalDist(fit.centered_residuals), truth, 2),
    )


def _squared_mean_report(distances, bound, reps, seed, check):
    mean = float(np.mean(distances))
    sd = float(np.std(distances, ddof=1)) if reps > 1 else 0.0
    # delta-method standard error of the squared mean
    se = 2.0 * mean * sd / np.sqrt(reps)
    return _report(mean**2, bound, 2.0 * se, reps, seed, check)


def check_lemma_bounds(spec, reps=200, seed=None, threads=None):
    """
    Replicate the fixed-design model ``reps`` times (fresh errors, same X) and
    check E²{d₂(F̃_n, F_n)} ≤ p·tr(Σ)/n and the centered residual version
    against (p + 1)·tr(Σ)/n, with two Monte Carlo standard errors of slack.

    ``seed`` overrides ``spec.seed``.
    """
    if reps < 1:
        raise InvalidConfiguration(f"reps must be positive, got {reps}")
    if spec.n > 200:
        logger.warning(f"Lemma check with n={spec.n}: assignment cost grows as n^3")
    if seed is not None:
        spec = replace(spec, seed=seed)

    def worker(start, stop):
        return [_lemma_distances(spec, k) for k in range(start, stop)]

    pairs = np.array([d for chunk in run_chunked(worker, reps, threads) for d in chunk])
    trace = float(np.trace(spec.sigma))
    residual = _squared_mean_report(pairs[:, 0], spec.p * trace / spec.n, reps, spec.seed, 'lemma1')
    centered = _squared_mean_report(pairs[:, 1], (spec.p + 1) * trace / spec.n, reps, spec.seed, 'lemma2')
    logger.info(f"Lemma checks: residual={residual.estimate:.4g}/{residual.bound:.4g}, "
                f"centered={centered.estimate:.4g}/{centered.bound:.4g}")
    return LemmaBoundReport(residual=residual, centered=centered)


def _second_moment(a):
    centered = a - a.mean(axis=0)
    return centered.T @ centered / a.shape[0]


def check_lemma6(u, v):
    """
    Both sides of ‖s_u² - s_v²‖_F² ≤ ‖m^{-1}Σ(u_i - v_i)(u_i - v_i)ᵀ‖_F², with
    s² the divisor-m covariance. Evaluated literally; the inequality fails
    for some pairs with a large common scale.
    """
    u = as_matrix(u, 'u')
    v = as_matrix(v, 'v')
    if u.shape != v.shape:
        raise DimensionMismatch(f"u has shape {u.shape} but v has shape {v.shape}")
    diff = u - v
    lhs = float(np.sum((_second_moment(u) - _second_moment(v)) ** 2))
    rhs = float(np.sum((diff.T @ diff / u.shape[0]) ** 2))
    return BoundReport(
        estimate=lhs,
        bound=rhs,
        slack=LEMMA6_TOLERANCE,
        passed=bool(lhs <= rhs + LEMMA6_TOLERANCE),
        trials=1,
        check='lemma6',
    )
