"""
vec, vech and Kronecker operators.

Matrices are 2-D float64 ndarrays stored in numpy's default row-major
order. ``vec`` stacks columns (entry (i, j) of an r×p matrix lands at
index i + r·j), which is the convention under which
Cov(vec β̂) = (𝕏ᵀ𝕏)^{-1} ⊗ Σ for the r×p coefficient matrix.
``vech`` stacks the lower triangle, diagonal included, column by column.
"""
import math

import numpy as np

from core.exceptions import AsymmetricInput, DimensionMismatch

SYMMETRY_TOLERANCE = 1e-10


def as_matrix(a, name='matrix'):
    arr = np.asarray(a, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    return arr


def asymmetry(a):
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return float(np.max(np.abs(a - a.T)))


def vec(a):
    return as_matrix(a).reshape(-1, order='F')


def unvec(v, rows):
    v = np.asarray(v, dtype=float).ravel()
    if rows < 1 or v.size % rows:
        raise DimensionMismatch(f"cannot reshape {v.size} entries into {rows} rows")
    return v.reshape(rows, v.size // rows, order='F')


def vech(a, tol=SYMMETRY_TOLERANCE):
    a = as_matrix(a)
    gap = asymmetry(a)
    if gap > tol:
        raise AsymmetricInput(f"vech needs a symmetric matrix; max |A_ij - A_ji| = {gap:.3g}")
    rows, cols = np.triu_indices(a.shape[0])
    # (cols, rows) walks the lower triangle column by column
    return a[cols, rows].copy()


def unvech(v):
    v = np.asarray(v, dtype=float).ravel()
    p = int((math.isqrt(8 * v.size + 1) - 1) // 2)
    if p * (p + 1) // 2 != v.size or p < 1:
        raise DimensionMismatch(f"{v.size} is not a triangular number")
    out = np.zeros((p, p))
    rows, cols = np.triu_indices(p)
    out[cols, rows] = v
    out[rows, cols] = v
    return out


def kron(a, b):
    return np.kron(as_matrix(a, 'left factor'), as_matrix(b, 'right factor'))
