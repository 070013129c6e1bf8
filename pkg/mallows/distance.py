"""
Exact Mallows (Wasserstein) distance between equal-mass empirical laws.

For two m-atom laws with uniform weights the optimal coupling is a
permutation, so d_l = (min_σ m^{-1} Σ_i ‖u_i - v_σ(i)‖^l)^{1/l} is an
assignment problem. scipy's ``linear_sum_assignment`` solves it exactly;
on the real line the sorted pairing is optimal and is used instead.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from core.exceptions import DimensionMismatch, InvalidConfiguration, UnequalSupportSizes
from tensorlinalg.operators import as_matrix


@dataclass(frozen=True)
class EmpiricalDist:
    """m equally weighted atoms in ℝ^k, one per row of ``points``."""
    points: np.ndarray

    def __post_init__(self):
        points = np.array(as_matrix(self.points, 'points'))
        if not np.all(np.isfinite(points)):
            raise InvalidConfiguration("empirical distribution atoms must be finite")
        points.setflags(write=False)
        object.__setattr__(self, 'points', points)

    @property
    def m(self):
        return self.points.shape[0]

    @property
    def k(self):
        return self.points.shape[1]

    @property
    def mean(self):
        return self.points.mean(axis=0)

    def shift(self, c):
        return EmpiricalDist(self.points + np.asarray(c, dtype=float))


def _as_dist(value):
    return value if isinstance(value, EmpiricalDist) else EmpiricalDist(value)


def _check_pair(mu, nu, l):
    if l < 1:
        raise InvalidConfiguration(f"Mallows order must be >= 1, got {l}")
    if mu.k != nu.k:
        raise DimensionMismatch(f"atoms live in R^{mu.k} and R^{nu.k}")
    if mu.m != nu.m:
        raise UnequalSupportSizes(f"support sizes {mu.m} and {nu.m} differ; only equal-mass laws are supported")


def cost_matrix(mu, nu, l=2):
    if mu.k == 1:
        return np.abs(mu.points[:, 0][:, None] - nu.points[:, 0][None, :]) ** l
    return cdist(mu.points, nu.points) ** l


def optimal_assignment(mu, nu, l=2, method='auto'):
    """
    Optimal pairing as an index array: atom i of ``mu`` goes to atom
    ``pairing[i]`` of ``nu``. Returns (pairing, total cost).
    """
    mu, nu = _as_dist(mu), _as_dist(nu)
    _check_pair(mu, nu, l)
    if method == 'auto':
        method = 'sort' if mu.k == 1 else 'assignment'
    if method == 'sort':
        if mu.k != 1:
            raise DimensionMismatch("the sorted pairing is only optimal on the real line")
        pairing = np.empty(mu.m, dtype=np.intp)
        pairing[np.argsort(mu.points[:, 0], kind='stable')] = np.argsort(nu.points[:, 0], kind='stable')
        costs = np.abs(mu.points[:, 0] - nu.points[pairing, 0]) ** l
        return pairing, float(costs.sum())
    if method != 'assignment':
        raise InvalidConfiguration(f"unknown assignment method '{method}'")
    costs = cost_matrix(mu, nu, l)
    rows, cols = linear_sum_assignment(costs)
    pairing = np.empty(mu.m, dtype=np.intp)
    pairing[rows] = cols
    return pairing, float(costs[np.arange(mu.m), pairing].sum())


def mallows_distance(mu, nu, l=2, method='auto'):
    mu, nu = _as_dist(mu), _as_dist(nu)
    _, total = optimal_assignment(mu, nu, l, method)
    return (total / mu.m) ** (1.0 / l)
