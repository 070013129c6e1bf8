"""
Delta method for smooth functions of vec(β).

The gradient is taken from a user callback when one is given, and checked
against central finite differences; otherwise the finite differences are
used directly.
"""
import logging

import numpy as np

from core.conf import mvboot_setting
from core.exceptions import DimensionMismatch, GradientMismatch, InvalidConfiguration

from .normal_theory import fixed_design_covariance
from .sandwich import sandwich_parts

logger = logging.getLogger(__name__)

METHODS = ('fixed', 'sandwich', 'bootstrap')


def _evaluate(f, point):
    return np.atleast_1d(np.asarray(f(point), dtype=float)).ravel()


def finite_difference_jacobian(f, point, step=None):
    """k×m central-difference Jacobian with step h_j = max(h, h·|x_j|)."""
    step = mvboot_setting('FINITE_DIFFERENCE_STEP') if step is None else step
    point = np.asarray(point, dtype=float).ravel()
    columns = []
    for j in range(point.size):
        h = max(step, step * abs(point[j]))
        up = point.copy()
        down = point.copy()
        up[j] += h
        down[j] -= h
        columns.append((_evaluate(f, up) - _evaluate(f, down)) / (2.0 * h))
    return np.column_stack(columns)


def propagate_covariance(point, covariance, f, grad_f=None):
    """∇f·V·∇fᵀ at ``point``."""
    point = np.asarray(point, dtype=float).ravel()
    covariance = np.asarray(covariance, dtype=float)
    if covariance.shape != (point.size, point.size):
        raise DimensionMismatch(f"covariance has shape {covariance.shape}, expected {point.size}x{point.size}")
    numeric = finite_difference_jacobian(f, point)
    if grad_f is None:
        jacobian = numeric
    else:
        jacobian = np.atleast_2d(np.asarray(grad_f(point), dtype=float))
        if jacobian.shape != numeric.shape:
            raise GradientMismatch(f"gradient has shape {jacobian.shape}, expected {numeric.shape}")
        gap = float(np.max(np.abs(jacobian - numeric)))
        scale = max(1.0, float(np.max(np.abs(numeric))))
        if gap > mvboot_setting('GRADIENT_TOLERANCE') * scale:
            raise GradientMismatch(f"supplied gradient differs from finite differences by {gap:.3g}")
    out = jacobian @ covariance @ jacobian.T
    return 0.5 * (out + out.T)


def delta_method(fit, f, grad_f=None, method='fixed', data=None, draws=None):
    """
    Covariance of f(vec β̂) under the fixed-design plug-in, the sandwich
    estimate Δ̂/n (needs ``data``) or the bootstrap Var* (needs ``draws``).
    """
    if method == 'fixed':
        covariance = fixed_design_covariance(fit)
    elif method == 'sandwich':
        if data is None:
            raise InvalidConfiguration("the sandwich delta method needs the dataset")
        covariance = sandwich_parts(data, fit).covariance
    elif method == 'bootstrap':
        if draws is None:
            raise InvalidConfiguration("the bootstrap delta method needs bootstrap draws")
        covariance = draws.var_star
    else:
        raise InvalidConfiguration(f"unknown delta method covariance '{method}', expected one of {METHODS}")
    logger.debug(f"Delta method with {method} covariance")
    return propagate_covariance(fit.vec_beta, covariance, f, grad_f)
