"""
Domain types of the multivariate regression model Y_i = βX_i + ε_i.
"""
from dataclasses import dataclass, field

import numpy as np

from core.exceptions import DimensionMismatch, InvalidDataset
from tensorlinalg.operators import as_matrix, vec
from tensorlinalg.spd import SpdMat


def vec_labels(response_names, predictor_names):
    """Labels for vec(β) components, "response:predictor", in column-major order."""
    return tuple(f"{response}:{predictor}" for predictor in predictor_names for response in response_names)


def _freeze(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Dataset:
    """
    Design 𝕏 (n×p) and responses 𝕐 (n×r), one row per case.

    Requires n > p, r >= 1 and finite entries. ``metadata`` records how the
    design was built (intercept flag, factor encodings).
    """
    X: np.ndarray
    Y: np.ndarray
    predictor_names: tuple = ()
    response_names: tuple = ()
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        X = as_matrix(self.X, 'X')
        Y = as_matrix(self.Y, 'Y')
        if X.shape[0] != Y.shape[0]:
            raise InvalidDataset(f"X has {X.shape[0]} rows but Y has {Y.shape[0]}")
        n, p = X.shape
        if n <= p:
            raise InvalidDataset(f"need more cases than predictors, got n={n}, p={p}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise InvalidDataset("X and Y must contain only finite values")
        predictors = tuple(self.predictor_names) or tuple(f"x{j + 1}" for j in range(p))
        responses = tuple(self.response_names) or tuple(f"y{a + 1}" for a in range(Y.shape[1]))
        if len(predictors) != p or len(responses) != Y.shape[1]:
            raise InvalidDataset("column names do not match the matrix shapes")
        object.__setattr__(self, 'X', _freeze(X))
        object.__setattr__(self, 'Y', _freeze(Y))
        object.__setattr__(self, 'predictor_names', predictors)
        object.__setattr__(self, 'response_names', responses)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def r(self):
        return self.Y.shape[1]

    @property
    def labels(self):
        return vec_labels(self.response_names, self.predictor_names)

    def take(self, rows):
        """The dataset made of the given case indices (with repetition)."""
        return Dataset(self.X[rows], self.Y[rows], self.predictor_names, self.response_names, self.metadata)


@dataclass(frozen=True)
class FitResult:
    """OLS fit: β̂ (r×p), residuals (n×r), Σ̂ (r×r, NND), μ̂ (r) and 𝕏ᵀ𝕏."""
    beta_hat: np.ndarray
    residuals: np.ndarray
    sigma_hat: np.ndarray
    mu_hat: np.ndarray
    xtx: SpdMat
    labels: tuple = ()

    def __post_init__(self):
        for name in ('beta_hat', 'residuals', 'sigma_hat', 'mu_hat'):
            object.__setattr__(self, name, _freeze(getattr(self, name)))

    @property
    def n(self):
        return self.residuals.shape[0]

    @property
    def r(self):
        return self.beta_hat.shape[0]

    @property
    def p(self):
        return self.beta_hat.shape[1]

    @property
    def vec_beta(self):
        return vec(self.beta_hat)

    @property
    def centered_residuals(self):
        """Support of the centered empirical error law F̂_n."""
        return self.residuals - self.mu_hat

    def fitted(self, X):
        return np.asarray(X, dtype=float) @ self.beta_hat.T


@dataclass(frozen=True)
class IntervalTable:
    """Per-component bounds for vec(β) under one method."""
    method: str
    labels: tuple
    lower: np.ndarray
    upper: np.ndarray
    alpha: float

    def __post_init__(self):
        lower = _freeze(np.ravel(self.lower))
        upper = _freeze(np.ravel(self.upper))
        if lower.shape != upper.shape or len(self.labels) != lower.size:
            raise DimensionMismatch("interval bounds and labels must have equal length")
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)
        object.__setattr__(self, 'labels', tuple(self.labels))

    def __len__(self):
        return self.lower.size

    @property
    def width(self):
        return self.upper - self.lower

    def select(self, count):
        return IntervalTable(self.method, self.labels[:count], self.lower[:count], self.upper[:count], self.alpha)

    def covers(self, truth, rel_tol=1e-9):
        truth = np.ravel(truth)
        slack = rel_tol * np.maximum(1.0, np.abs(truth))
        return (self.lower - slack <= truth) & (truth <= self.upper + slack)
