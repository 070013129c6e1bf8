"""
Symmetric positive definite matrices and their factorizations.
"""
from functools import cached_property

import numpy as np
from scipy import linalg

from core.conf import mvboot_setting
from core.exceptions import DimensionMismatch, NearSingular

from .operators import as_matrix


class SpdMat:
    """
    A symmetric positive definite matrix.

    The input is symmetrized on construction and accepted only when its
    smallest eigenvalue exceeds ``SPD_RELATIVE_TOLERANCE`` times the largest
    absolute diagonal entry. Cholesky and eigen factorizations are computed
    once and cached; instances are never mutated afterwards.
    """

    def __init__(self, matrix, tol=None, name='matrix'):
        a = as_matrix(matrix, name)
        if a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise NearSingular(f"{name} has non-finite entries")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        self._matrix = a
        self.name = name
        self.tol = mvboot_setting('SPD_RELATIVE_TOLERANCE') if tol is None else tol
        floor = self.tol * float(np.max(np.abs(np.diag(a))))
        smallest = float(self.eigenvalues[0])
        if not smallest > floor:
            raise NearSingular(
                f"{name} is not positive definite: smallest eigenvalue {smallest:.3g} "
                f"<= tolerance {floor:.3g}"
            )

    def __repr__(self):
        return f"SpdMat({self.shape[0]}x{self.shape[1]}, name={self.name!r})"

    @property
    def matrix(self):
        return self._matrix

    @property
    def shape(self):
        return self._matrix.shape

    def __array__(self, dtype=None, copy=None):
        return self._matrix.astype(dtype) if dtype is not None else self._matrix.copy()

    @cached_property
    def _eigh(self):
        return linalg.eigh(self._matrix)

    @property
    def eigenvalues(self):
        return self._eigh[0]

    @cached_property
    def cholesky(self):
        try:
            return linalg.cho_factor(self._matrix, lower=True, check_finite=False)
        except linalg.LinAlgError as exc:
            raise NearSingular(f"Cholesky factorization of {self.name} failed: {exc}") from exc

    def solve(self, rhs):
        """A^{-1} rhs through the cached Cholesky factor."""
        return linalg.cho_solve(self.cholesky, np.asarray(rhs, dtype=float), check_finite=False)

    def inverse(self):
        return spd_inverse(self)

    def sqrt(self):
        return spd_sqrt(self)

    def inverse_sqrt(self):
        values, vectors = self._eigh
        return SpdMat((vectors / np.sqrt(values)) @ vectors.T, tol=self.tol, name=f"{self.name}^-1/2")


def spd_inverse(a):
    if not isinstance(a, SpdMat):
        a = SpdMat(a)
    inv = a.solve(np.eye(a.shape[0]))
    return SpdMat(inv, tol=a.tol, name=f"{a.name}^-1")


def spd_sqrt(a):
    """Symmetric square root from the eigendecomposition (not the Cholesky root)."""
    if not isinstance(a, SpdMat):
        a = SpdMat(a)
    values, vectors = a._eigh
    return SpdMat((vectors * np.sqrt(values)) @ vectors.T, tol=a.tol, name=f"{a.name}^1/2")


def psd_root(a):
    """
    Symmetric root of a nonnegative definite matrix, negative eigenvalues
    clipped to zero. Used to colour noise with a possibly singular Σ.
    """
    a = as_matrix(a)
    a = 0.5 * (a + a.T)
    values, vectors = linalg.eigh(a)
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.T
