"""
Fixed-design normal theory: the plug-in covariance (𝕏ᵀ𝕏)^{-1} ⊗ Σ̂ of
vec(β̂), the matching normal intervals and the bootstrap pivot.
"""
import numpy as np
from scipy import stats

from core.conf import mvboot_setting
from core.exceptions import DimensionMismatch
from regression.structures import IntervalTable
from tensorlinalg.operators import kron, unvec, vec
from tensorlinalg.spd import SpdMat


def z_quantile(alpha):
    return float(stats.norm.ppf(1.0 - alpha / 2.0))


def normal_intervals(point, covariance, alpha, labels, method):
    """vec(β̂)_k ± z_{1-alpha/2}·√V_kk for every component."""
    point = np.ravel(point)
    variances = np.clip(np.diag(covariance), 0.0, None)
    half = z_quantile(alpha) * np.sqrt(variances)
    return IntervalTable(method, labels, point - half, point + half, alpha)


def fixed_design_covariance(fit):
    """Cov(vec β̂) under a fixed design, (𝕏ᵀ𝕏)^{-1} ⊗ Σ̂."""
    return kron(fit.xtx.inverse().matrix, fit.sigma_hat)


def fixed_design_intervals(fit, alpha=None):
    alpha = mvboot_setting('DEFAULT_ALPHA') if alpha is None else alpha
    return normal_intervals(fit.vec_beta, fixed_design_covariance(fit), alpha, fit.labels, 'normal-fixed')


def pivot_statistics(fit, draws):
    """
    {(𝕏ᵀ𝕏)^{1/2} ⊗ Σ̂*_b^{-1/2}}(vec β̂*_b - vec β̂) for every replicate b.

    Evaluated as vec(Σ̂*_b^{-1/2} D_b (𝕏ᵀ𝕏)^{1/2}) with D_b = β̂*_b - β̂, which
    avoids forming the rp×rp Kronecker factor. Raises NearSingular when a
    replicate's Σ̂* is not positive definite.
    """
    if draws.draws.shape[1] != fit.r * fit.p:
        raise DimensionMismatch("draws do not match the fitted coefficient shape")
    root = fit.xtx.sqrt().matrix
    centre = fit.vec_beta
    pivots = np.empty_like(draws.draws)
    for b, (draw, sigma_star) in enumerate(zip(draws.draws, draws.sigma_star)):
        scale = SpdMat(sigma_star, name=f"sigma* of replicate {b}").inverse_sqrt().matrix
        pivots[b] = vec(scale @ unvec(draw - centre, fit.r) @ root)
    return pivots
