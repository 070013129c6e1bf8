"""
Var* and the percentile interval computed from stored replicates.
"""
import math

import numpy as np

from core.conf import mvboot_setting
from core.exceptions import DimensionMismatch, InsufficientDraws
from regression.structures import IntervalTable

from .structures import BootstrapDraws

# absorbs float noise in B·alpha/2 before the ceiling
RANK_EPSILON = 1e-9


def _draw_matrix(draws):
    if isinstance(draws, BootstrapDraws):
        draws = draws.draws
    arr = np.asarray(draws, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"draws must be a B x k array, got shape {arr.shape}")
    return arr


def var_star(draws):
    """(B-1)^{-1} Σ_b (d_b - d̄)(d_b - d̄)ᵀ over the stored replicates."""
    d = _draw_matrix(draws)
    if d.shape[0] < 2:
        raise InsufficientDraws(f"Var* needs at least two replicates, got {d.shape[0]}")
    cov = np.atleast_2d(np.cov(d, rowvar=False, ddof=1))
    return 0.5 * (cov + cov.T)


def percentile_ranks(B, alpha):
    """1-indexed ceiling ranks ⌈B·alpha/2⌉ and ⌈B(1 - alpha/2)⌉."""
    if B * alpha / 2 < 1:
        raise InsufficientDraws(f"B={B} is too small for alpha={alpha}: need B*alpha/2 >= 1")
    lower = math.ceil(B * alpha / 2 - RANK_EPSILON)
    upper = math.ceil(B * (1 - alpha / 2) - RANK_EPSILON)
    if lower >= upper:
        raise InsufficientDraws(f"percentile ranks collide for B={B}, alpha={alpha}")
    return lower, upper


def percentile_interval(draws, alpha=None, labels=None, method='percentile'):
    """
    Order-statistic interval per component, no interpolation.

    ``draws`` may be a BootstrapDraws (whose labels are used) or a B×k array.
    """
    if labels is None and isinstance(draws, BootstrapDraws):
        labels = draws.labels
    alpha = mvboot_setting('DEFAULT_ALPHA') if alpha is None else alpha
    d = _draw_matrix(draws)
    lower_rank, upper_rank = percentile_ranks(d.shape[0], alpha)
    ordered = np.sort(d, axis=0)
    labels = tuple(labels) if labels else tuple(f"v{k + 1}" for k in range(d.shape[1]))
    return IntervalTable(method, labels, ordered[lower_rank - 1], ordered[upper_rank - 1], alpha)
