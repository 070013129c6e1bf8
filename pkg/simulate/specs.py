"""
Generator specifications and the experiment configuration file.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from core.conf import mvboot_setting
from core.exceptions import BlockNotSPD, DimensionMismatch, InvalidConfiguration, NearSingular
from core.streams import validate_seed
from tensorlinalg.operators import as_matrix, asymmetry
from tensorlinalg.spd import SpdMat

logger = logging.getLogger(__name__)

ERROR_LAWS = ('gaussian', 'student_t', 'uniform')

CONFIG_KEYS = {
    'version', 'r', 'p', 'beta', 'sigma_diagonal', 'sigma_off_diagonal', 'sigma_x', 'sigma_x_eps',
    'error_law', 'student_t_df', 'seed', 'table_sizes', 'table_components', 'alpha',
}

NND_TOLERANCE = 1e-10


def _frozen(a, name):
    arr = np.array(as_matrix(a, name))
    arr.setflags(write=False)
    return arr


def _check_error_law(law, df):
    if law not in ERROR_LAWS:
        raise InvalidConfiguration(f"unknown error law '{law}', expected one of {ERROR_LAWS}")
    if law == 'student_t' and df < 5:
        raise InvalidConfiguration(f"student_t errors need df >= 5 for finite fourth moments, got {df}")


def _check_covariance(sigma, name):
    if sigma.shape[0] != sigma.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {sigma.shape}")
    if asymmetry(sigma) > NND_TOLERANCE * max(1.0, float(np.max(np.abs(sigma)))):
        raise InvalidConfiguration(f"{name} must be symmetric")
    smallest = float(np.linalg.eigvalsh(0.5 * (sigma + sigma.T))[0])
    if smallest < -NND_TOLERANCE * max(1.0, float(np.max(np.abs(np.diag(sigma))))):
        raise InvalidConfiguration(f"{name} must be nonnegative definite, smallest eigenvalue {smallest:.3g}")


@dataclass(frozen=True)
class ExperimentConfig:
    version: int
    beta: np.ndarray
    sigma: np.ndarray
    sigma_x: np.ndarray
    sigma_x_eps: np.ndarray
    error_law: str = 'gaussian'
    student_t_df: float = 5
    seed: int = 0
    table_sizes: tuple = (100, 500, 1000, 5000)
    table_components: int = 2
    alpha: float = 0.05
    source: str = ''
    raw: dict = field(default_factory=dict)

    @property
    def r(self):
        return self.beta.shape[0]

    @property
    def p(self):
        return self.beta.shape[1]

    def as_dict(self):
        """Echo of the loaded file, as printed in every simulation report."""
        return {'source': self.source, **self.raw}


def load_experiment_config(path=None):
    """
    Read the flat YAML generator configuration.

    Defaults to the ``EXPERIMENT_CONFIG`` setting. Unknown keys are rejected
    so a typo cannot silently fall back to a default.
    """
    path = Path(path or mvboot_setting('EXPERIMENT_CONFIG'))
    try:
        with open(path, 'r', encoding='utf-8') as f:
            raw = yaml.safe_load(f)
    except OSError as exc:
        raise InvalidConfiguration(f"cannot read experiment config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise InvalidConfiguration(f"experiment config {path} is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise InvalidConfiguration(f"experiment config {path} must be a key/value mapping")
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise InvalidConfiguration(f"unknown experiment config keys: {', '.join(sorted(unknown))}")
    if 'version' not in raw:
        raise InvalidConfiguration("experiment config must carry a 'version' key")

    try:
        r, p = int(raw['r']), int(raw['p'])
        beta = np.asarray(raw['beta'], dtype=float)
        sigma = np.full((r, r), float(raw.get('sigma_off_diagonal', 0.0)))
        np.fill_diagonal(sigma, float(raw.get('sigma_diagonal', 1.0)))
        sigma_x = np.asarray(raw.get('sigma_x', np.eye(p).tolist()), dtype=float)
        sigma_x_eps = np.asarray(raw.get('sigma_x_eps', 0.0), dtype=float)
        if sigma_x_eps.ndim == 0:
            sigma_x_eps = np.full((p, r), float(sigma_x_eps))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidConfiguration(f"experiment config {path} is malformed: {exc}") from exc
    if beta.shape != (r, p) or sigma_x.shape != (p, p) or sigma_x_eps.shape != (p, r):
        raise DimensionMismatch(f"experiment config shapes do not match r={r}, p={p}")

    law = raw.get('error_law', 'gaussian')
    df = float(raw.get('student_t_df', 5))
    _check_error_law(law, df)
    _check_covariance(sigma, 'sigma')
    config = ExperimentConfig(
        version=raw['version'],
        beta=_frozen(beta, 'beta'),
        sigma=_frozen(sigma, 'sigma'),
        sigma_x=_frozen(sigma_x, 'sigma_x'),
        sigma_x_eps=_frozen(sigma_x_eps, 'sigma_x_eps'),
        error_law=law,
        student_t_df=df,
        seed=validate_seed(raw.get('seed', 0)),
        table_sizes=tuple(int(n) for n in raw.get('table_sizes', (100, 500, 1000, 5000))),
        table_components=int(raw.get('table_components', 2)),
        alpha=float(raw.get('alpha', mvboot_setting('DEFAULT_ALPHA'))),
        source=str(path),
        raw=raw,
    )
    logger.info(f"Loaded experiment config version {config.version} from {path}")
    return config


@dataclass(frozen=True)
class FixedDesignSpec:
    """
    Fixed design: X has i.i.d. standard normal rows frozen by ``seed``;
    errors are drawn per error index with covariance ``sigma`` (NND).
    """
    n: int
    beta: np.ndarray
    sigma: np.ndarray
    seed: int = 0
    error_law: str = 'gaussian'
    student_t_df: float = 5

    def __post_init__(self):
        beta = _frozen(self.beta, 'beta')
        sigma = _frozen(self.sigma, 'sigma')
        if sigma.shape != (beta.shape[0], beta.shape[0]):
            raise DimensionMismatch(f"sigma has shape {sigma.shape}, beta needs {beta.shape[0]}x{beta.shape[0]}")
        if self.n <= beta.shape[1]:
            raise InvalidConfiguration(f"n={self.n} must exceed p={beta.shape[1]}")
        _check_covariance(sigma, 'sigma')
        _check_error_law(self.error_law, self.student_t_df)
        object.__setattr__(self, 'beta', beta)
        object.__setattr__(self, 'sigma', sigma)
        object.__setattr__(self, 'seed', validate_seed(self.seed))

    @property
    def p(self):
        return self.beta.shape[1]

    @property
    def r(self):
        return self.beta.shape[0]

    @classmethod
    def from_config(cls, config, n, seed=None):
        return cls(
            n=n,
            beta=config.beta,
            sigma=config.sigma,
            seed=config.seed if seed is None else seed,
            error_law=config.error_law,
            student_t_df=config.student_t_df,
        )


@dataclass(frozen=True)
class JointDesignSpec:
    """(X_i, ε_i) drawn jointly with block covariance [[Σ_X, Σ_Xε], [Σ_εX, Σ]]."""
    n: int
    beta: np.ndarray
    sigma_x: np.ndarray
    sigma_x_eps: np.ndarray
    sigma: np.ndarray
    seed: int = 0
    error_law: str = 'gaussian'
    student_t_df: float = 5

    def __post_init__(self):
        beta = _frozen(self.beta, 'beta')
        r, p = beta.shape
        sigma_x = _frozen(self.sigma_x, 'sigma_x')
        sigma = _frozen(self.sigma, 'sigma')
        sigma_x_eps = _frozen(self.sigma_x_eps, 'sigma_x_eps')
        if sigma_x.shape != (p, p) or sigma.shape != (r, r) or sigma_x_eps.shape != (p, r):
            raise DimensionMismatch(f"covariance blocks do not match beta of shape {beta.shape}")
        if self.n <= p:
            raise InvalidConfiguration(f"n={self.n} must exceed p={p}")
        _check_error_law(self.error_law, self.student_t_df)
        for name, value in (('beta', beta), ('sigma_x', sigma_x), ('sigma_x_eps', sigma_x_eps), ('sigma', sigma)):
            object.__setattr__(self, name, value)
        object.__setattr__(self, 'seed', validate_seed(self.seed))
        try:
            SpdMat(self.block, name='joint (X, eps) covariance')
        except NearSingular as exc:
            raise BlockNotSPD(str(exc)) from exc

    @property
    def p(self):
        return self.beta.shape[1]

    @property
    def r(self):
        return self.beta.shape[0]

    @property
    def block(self):
        return np.block([[self.sigma_x, self.sigma_x_eps], [self.sigma_x_eps.T, self.sigma]])

    @classmethod
    def from_config(cls, config, n, seed=None):
        return cls(
            n=n,
            beta=config.beta,
            sigma_x=config.sigma_x,
            sigma_x_eps=config.sigma_x_eps,
            sigma=config.sigma,
            seed=config.seed if seed is None else seed,
            error_law=config.error_law,
            student_t_df=config.student_t_df,
        )


@dataclass(frozen=True)
class CoverageReport:
    method: str
    labels: tuple
    coverage: np.ndarray
    mean_width: np.ndarray
    reps: int
    alpha: float
    n: int
    seed: int

    def __post_init__(self):
        coverage = np.asarray(self.coverage, dtype=float)
        if np.any(coverage < 0) or np.any(coverage > 1):
            raise InvalidConfiguration("coverage frequencies must lie in [0, 1]")

    def to_dict(self):
        return {
            'method': self.method,
            'n': self.n,
            'reps': self.reps,
            'alpha': self.alpha,
            'seed': self.seed,
            'components': [
                {'label': label, 'coverage': float(c), 'mean_width': float(w)}
                for label, c, w in zip(self.labels, self.coverage, self.mean_width)
            ],
        }
