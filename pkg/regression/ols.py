"""
Ordinary least squares for the multivariate model, β̂ = 𝕐ᵀ𝕏(𝕏ᵀ𝕏)^{-1}.

The normal equations are solved through the Cholesky factor of 𝕏ᵀ𝕏 kept
on the SpdMat, so every later formula written with (𝕏ᵀ𝕏)^{-1} or
(𝕏ᵀ𝕏)^{1/2} reuses the same factorization. No intercept is ever added
here.
"""
import logging

import numpy as np

from core.exceptions import DegenerateResiduals, NearSingular, SingularDesign
from tensorlinalg.spd import SpdMat

from .structures import FitResult

logger = logging.getLogger(__name__)

NND_TOLERANCE = 1e-10


def gram(X):
    try:
        return SpdMat(X.T @ X, name="X'X")
    except NearSingular as exc:
        raise SingularDesign(f"X'X is singular, the predictors are collinear ({exc})") from exc


def ols_coefficients(xtx, X, Y):
    """β̂ (r×p) given a factored 𝕏ᵀ𝕏."""
    return xtx.solve(X.T @ Y).T


def sigma_hat(residuals):
    """
    Error covariance estimate with divisor n, centered at the residual mean.

    Returns (Σ̂, μ̂) with Σ̂ = n^{-1} Σ ε̂_i ε̂_iᵀ - μ̂μ̂ᵀ.
    """
    e = np.asarray(residuals, dtype=float)
    if e.ndim == 1:
        e = e.reshape(-1, 1)
    n = e.shape[0]
    if n < 2:
        raise DegenerateResiduals(f"need at least two residual rows, got {n}")
    mu = e.mean(axis=0)
    sigma = e.T @ e / n - np.outer(mu, mu)
    sigma = 0.5 * (sigma + sigma.T)
    smallest = float(np.linalg.eigvalsh(sigma)[0])
    if smallest < -NND_TOLERANCE * max(1.0, float(np.max(np.abs(np.diag(sigma))))):
        raise DegenerateResiduals(f"residual covariance has eigenvalue {smallest:.3g}")
    return sigma, mu


def fit_ols(data):
    X, Y = data.X, data.Y
    xtx = gram(X)
    beta = ols_coefficients(xtx, X, Y)
    residuals = Y - X @ beta.T
    sigma, mu = sigma_hat(residuals)
    logger.debug(f"Fitted OLS with n={data.n}, p={data.p}, r={data.r}")
    return FitResult(beta_hat=beta, residuals=residuals, sigma_hat=sigma, mu_hat=mu, xtx=xtx, labels=data.labels)
