"""
The two resampling engines.

``residual_bootstrap`` keeps the design fixed and rebuilds responses from
the fitted model plus resampled centered residuals. ``pairs_bootstrap``
resamples whole cases (X_i, Y_i) and refits, redrawing any replicate whose
resampled design is singular.

Both engines run their replicate loop in contiguous chunks through
``core.streams.run_chunked``; replicate b always draws from the stream keyed
by (seed, b), so results do not depend on the thread count.
"""
import logging

import numpy as np

from core.exceptions import DimensionMismatch, NearSingular, SingularResamples
from core.streams import child_generator, run_chunked
from regression.ols import ols_coefficients, sigma_hat
from tensorlinalg.operators import as_matrix
from tensorlinalg.spd import SpdMat

from .intervals import var_star
from .structures import BootConfig, BootstrapDraws

logger = logging.getLogger(__name__)


def _merge(chunks, n):
    draws = np.concatenate([chunk['draws'] for chunk in chunks])
    sigma_star = np.concatenate([chunk['sigma_star'] for chunk in chunks])
    counts = np.zeros(n, dtype=np.int64)
    for chunk in chunks:
        counts += chunk['counts']
    return draws, sigma_star, counts


def residual_bootstrap(fit, X, cfg=None, threads=None):
    """
    Fixed-design residual bootstrap.

    Each replicate draws n rows uniformly from the centered residuals
    ε̂_j - μ̂, forms 𝕐* = 𝕏β̂ᵀ + ε* and refits through the Cholesky factor
    of 𝕏ᵀ𝕏 held on ``fit``.
    """
    X = as_matrix(X, 'X')
    if X.shape != (fit.n, fit.p):
        raise DimensionMismatch(f"X has shape {X.shape}, the fit expects ({fit.n}, {fit.p})")
    n, r, p = fit.n, fit.r, fit.p
    cfg = (cfg or BootConfig()).resolve(n)
    centered = fit.centered_residuals
    fitted = fit.fitted(X)
    xtx = fit.xtx
    logger.info(f"Residual bootstrap: B={cfg.B}, n={n}, seed={cfg.seed}")

    def worker(start, stop):
        draws = np.empty((stop - start, r * p))
        sigmas = np.empty((stop - start, r, r))
        counts = np.zeros(n, dtype=np.int64)
        for offset, b in enumerate(range(start, stop)):
            rows = child_generator(cfg.seed, b).integers(0, n, size=n)
            counts += np.bincount(rows, minlength=n)
            y_star = fitted + centered[rows]
            beta_star = ols_coefficients(xtx, X, y_star)
            draws[offset] = beta_star.reshape(-1, order='F')
            sigmas[offset] = sigma_hat(y_star - X @ beta_star.T)[0]
        return {'draws': draws, 'sigma_star': sigmas, 'counts': counts}

    draws, sigma_star, counts = _merge(run_chunked(worker, cfg.B, threads), n)
    logger.info(f"Residual bootstrap finished: {cfg.B} replicates")
    return BootstrapDraws(
        method='residual',
        draws=draws,
        var_star=var_star(draws),
        sigma_star=sigma_star,
        resample_counts=counts,
        config=cfg,
        labels=fit.labels,
    )


def _stream(seed, replicate, attempt):
    if attempt == 0:
        return child_generator(seed, replicate)
    return child_generator(seed, replicate, attempt)


def pairs_bootstrap(data, cfg=None, threads=None):
    """
    Random-design pairs bootstrap.

    A replicate whose 𝕏*ᵀ𝕏* fails the SPD check is redrawn from the stream
    keyed (seed, b, attempt), at most ``max_redraws`` times.
    """
    X, Y = data.X, data.Y
    n, p, r = data.n, data.p, data.r
    cfg = (cfg or BootConfig()).resolve(n)
    logger.info(f"Pairs bootstrap: B={cfg.B}, n={n}, seed={cfg.seed}")

    def worker(start, stop):
        draws = np.empty((stop - start, r * p))
        sigmas = np.empty((stop - start, r, r))
        counts = np.zeros(n, dtype=np.int64)
        redraws = 0
        moment = None
        for offset, b in enumerate(range(start, stop)):
            for attempt in range(cfg.max_redraws + 1):
                rows = _stream(cfg.seed, b, attempt).integers(0, n, size=n)
                x_star = X[rows]
                try:
                    xtx_star = SpdMat(x_star.T @ x_star, name="X*'X*")
                except NearSingular:
                    redraws += 1
                    continue
                break
            else:
                raise SingularResamples(
                    f"replicate {b} drew a singular design {cfg.max_redraws + 1} times; "
                    f"check for near-constant predictors"
                )
            y_star = Y[rows]
            counts += np.bincount(rows, minlength=n)
            beta_star = ols_coefficients(xtx_star, x_star, y_star)
            draws[offset] = beta_star.reshape(-1, order='F')
            sigmas[offset] = sigma_hat(y_star - x_star @ beta_star.T)[0]
            moment = xtx_star.matrix / n
        return {'draws': draws, 'sigma_star': sigmas, 'counts': counts, 'redraws': redraws, 'moment': moment}

    chunks = run_chunked(worker, cfg.B, threads)
    draws, sigma_star, counts = _merge(chunks, n)
    redraws = sum(chunk['redraws'] for chunk in chunks)
    if redraws:
        logger.warning(f"Pairs bootstrap redrew {redraws} singular resamples")
    logger.info(f"Pairs bootstrap finished: {cfg.B} replicates")
    return BootstrapDraws(
        method='pairs',
        draws=draws,
        var_star=var_star(draws),
        sigma_star=sigma_star,
        resample_counts=counts,
        config=cfg,
        labels=data.labels,
        redraws=redraws,
        design_moment_last=chunks[-1]['moment'],
    )
