"""
Random-design sandwich covariance.

M̂ = n^{-1} Σ_i g_i g_iᵀ with g_i = vec(ε̂_i X_iᵀ) = X_i ⊗ ε̂_i, W = n^{-1}𝕏ᵀ𝕏
and Δ̂ = (W^{-1} ⊗ I_r) M̂ (W^{-1} ⊗ I_r). Cov(vec β̂) is estimated by Δ̂/n.
"""
from dataclasses import dataclass

import numpy as np

from core.conf import mvboot_setting
from core.exceptions import DimensionMismatch
from tensorlinalg.operators import kron
from tensorlinalg.spd import SpdMat

from .normal_theory import normal_intervals


@dataclass(frozen=True)
class SandwichParts:
    W: SpdMat
    M_hat: np.ndarray
    Delta_hat: np.ndarray
    n: int

    @property
    def covariance(self):
        return self.Delta_hat / self.n


def score_rows(X, residuals):
    """Row i is vec(ε̂_i X_iᵀ), an rp-vector in column-major order."""
    n, p = X.shape
    r = residuals.shape[1]
    return (X[:, :, None] * residuals[:, None, :]).reshape(n, p * r)


def sandwich_parts(data, fit):
    if fit.residuals.shape != (data.n, data.r) or fit.p != data.p:
        raise DimensionMismatch("the fit was not produced from this dataset")
    n, r = data.n, data.r
    scores = score_rows(data.X, fit.residuals)
    m_hat = scores.T @ scores / n
    m_hat = 0.5 * (m_hat + m_hat.T)
    w = SpdMat(data.X.T @ data.X / n, name='W')
    outer = kron(w.inverse().matrix, np.eye(r))
    delta = outer @ m_hat @ outer
    return SandwichParts(W=w, M_hat=m_hat, Delta_hat=0.5 * (delta + delta.T), n=n)


def sandwich_intervals(parts, fit, alpha=None):
    alpha = mvboot_setting('DEFAULT_ALPHA') if alpha is None else alpha
    return normal_intervals(fit.vec_beta, parts.covariance, alpha, fit.labels, 'normal-sandwich')
