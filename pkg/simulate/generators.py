"""
Data generators for the fixed-design and joint-Gaussian random-design models.

Streams: the fixed design matrix comes from key (0,), the errors of error
index k from (1, k), and the k-th joint replicate from (2, k), all under
the spec's seed. Regenerating with a new error index therefore redraws the
errors only.
"""
import numpy as np

from core.streams import child_generator
from regression.structures import Dataset
from tensorlinalg.spd import SpdMat, psd_root

DESIGN_STREAM = 0
ERROR_STREAM = 1
JOINT_STREAM = 2


def standard_draws(rng, shape, law='gaussian', df=5):
    """Mean-zero, unit-variance i.i.d. draws from the named law."""
    if law == 'gaussian':
        return rng.standard_normal(shape)
    if law == 'student_t':
        return rng.standard_t(df, size=shape) * np.sqrt((df - 2.0) / df)
    if law == 'uniform':
        return rng.uniform(-np.sqrt(3.0), np.sqrt(3.0), size=shape)
    raise ValueError(f"unknown error law {law!r}")


def correlated_draws(rng, n, covariance, law='gaussian', df=5):
    """n rows with covariance ``covariance``, coloured by its symmetric root."""
    root = psd_root(covariance)
    return standard_draws(rng, (n, root.shape[0]), law, df) @ root


def fixed_design(spec):
    return child_generator(spec.seed, DESIGN_STREAM).standard_normal((spec.n, spec.p))


def fixed_design_sample(spec, error_index=0):
    """The generated Dataset together with the true error matrix."""
    X = fixed_design(spec)
    rng = child_generator(spec.seed, ERROR_STREAM, error_index)
    errors = correlated_draws(rng, spec.n, spec.sigma, spec.error_law, spec.student_t_df)
    return Dataset(X, X @ spec.beta.T + errors, metadata={'generator': 'fixed', 'error_index': error_index}), errors


def gen_fixed(spec, error_index=0):
    return fixed_design_sample(spec, error_index)[0]


def gen_joint(spec, replicate=0):
    """Y_i = βX_i + ε_i with (X_i, ε_i) drawn from the joint block covariance."""
    rng = child_generator(spec.seed, JOINT_STREAM, replicate)
    joint = correlated_draws(rng, spec.n, spec.block, spec.error_law, spec.student_t_df)
    X, errors = joint[:, :spec.p], joint[:, spec.p:]
    return Dataset(X, X @ spec.beta.T + errors, metadata={'generator': 'joint', 'replicate': replicate})


def joint_estimand(spec):
    """β(μ) = E(YXᵀ)Σ_X^{-1} = β + Σ_εX Σ_X^{-1}, the OLS target under the joint law."""
    sigma_x = SpdMat(spec.sigma_x, name='sigma_x')
    return spec.beta + sigma_x.solve(spec.sigma_x_eps).T


def joint_residual_covariance(spec):
    """Cov(Y - β(μ)X) = Σ - Σ_εX Σ_X^{-1} Σ_Xε."""
    sigma_x = SpdMat(spec.sigma_x, name='sigma_x')
    out = spec.sigma - spec.sigma_x_eps.T @ sigma_x.solve(spec.sigma_x_eps)
    return 0.5 * (out + out.T)
