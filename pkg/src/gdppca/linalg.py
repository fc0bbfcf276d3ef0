"""Symmetric-matrix and subspace primitives.

Conventions used throughout the package:

* a "frame" is a d x m ndarray with orthonormal columns (checked to 1e-10),
* eigenpairs are ordered by descending eigenvalue,
* eigenvector signs are fixed so the entry of largest magnitude is
  nonnegative (lowest index wins ties), which makes spectra reproducible
  across LAPACK builds.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

ORTHO_TOL = 1e-10


class EigenPairs(NamedTuple):
    """Full eigendecomposition, eigenvalues descending."""

    values: np.ndarray
    vectors: np.ndarray


def _as_sym(a, name="a"):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    scale = max(1.0, np.abs(a).max() if a.size else 0.0)
    if np.abs(a - a.T).max() > 1e-12 * scale:
        raise ValueError(f"{name} must be symmetric")
    return a


def check_frame(v, name="v"):
    """Validate a d x m orthonormal frame and return it as float ndarray."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 2:
        raise ValueError(f"{name} must be 2-d, got shape {v.shape}")
    d, m = v.shape
    if m > d:
        raise ValueError(f"{name} has more columns than rows ({m} > {d})")
    gram = v.T @ v
    if np.linalg.norm(gram - np.eye(m)) > ORTHO_TOL:
        raise ValueError(f"{name} columns are not orthonormal")
    return v


def vecd(a):
    """Isometric half-vectorization of a symmetric matrix.

    Diagonal entries come first in index order, then the strict upper
    triangle row-major scaled by sqrt(2), so the Euclidean norm of the
    output equals the Frobenius norm of the input.
    """
    a = _as_sym(a)
    d = a.shape[0]
    iu = np.triu_indices(d, k=1)
    return np.concatenate([np.diag(a), np.sqrt(2.0) * a[iu]])


def vecd_inv(v, d):
    """Inverse of :func:`vecd` for dimension d."""
    v = np.asarray(v, dtype=float)
    q = d * (d + 1) // 2
    if v.shape != (q,):
        raise ValueError(f"expected vector of length {q} for d={d}, got {v.shape}")
    a = np.zeros((d, d))
    np.fill_diagonal(a, v[:d])
    iu = np.triu_indices(d, k=1)
    off = v[d:] / np.sqrt(2.0)
    a[iu] = off
    a[(iu[1], iu[0])] = off
    return a


def eigh(a):
    """Eigendecomposition of a symmetric matrix, descending order.

    Signs follow the largest-magnitude-entry convention described in the
    module docstring.
    """
    a = _as_sym(a)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"eigendecomposition failed for {a.shape[0]}x{a.shape[0]} matrix "
            f"with Frobenius norm {np.linalg.norm(a):.6g}: {exc}"
        ) from exc
    w = w[::-1]
    v = v[:, ::-1]
    return EigenPairs(w, _fix_signs(v))


def _fix_signs(v):
    lead = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[lead, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return v * signs


def top_m(pairs, m):
    """Frame of the m leading eigenvectors of an :class:`EigenPairs`."""
    d = pairs.vectors.shape[0]
    if not 1 <= m <= d:
        raise ValueError(f"m must be in [1, {d}], got {m}")
    return pairs.vectors[:, :m]


def sin_theta(v1, v2):
    """Largest principal-angle sine between two same-shape frames.

    Equals sqrt(1 - sigma_min(v1' v2)^2); 0 for identical subspaces, 1 for
    subspaces with an orthogonal direction.  Below sqrt(machine epsilon)
    the cosine route cannot resolve the angle (the m x m product only
    carries cosines), so tiny angles are recovered from the residual
    (I - v1 v1') v2, whose singular values are the principal-angle sines.
    """
    v1 = check_frame(v1, "v1")
    v2 = check_frame(v2, "v2")
    if v1.shape != v2.shape:
        raise ValueError(f"frame shapes differ: {v1.shape} vs {v2.shape}")
    smin = np.linalg.svd(v1.T @ v2, compute_uv=False)[-1]
    smin = min(max(smin, 0.0), 1.0)
    gap = 1.0 - smin * smin
    if gap > 1e-8:
        return float(np.sqrt(gap))
    resid = v2 - v1 @ (v1.T @ v2)
    smax = np.linalg.svd(resid, compute_uv=False)[0]
    return float(min(max(smax, 0.0), 1.0))


def proj_frob(v1, v2):
    """Frobenius distance between the orthogonal projectors of two frames."""
    v1 = check_frame(v1, "v1")
    v2 = check_frame(v2, "v2")
    if v1.shape != v2.shape:
        raise ValueError(f"frame shapes differ: {v1.shape} vs {v2.shape}")
    return float(np.linalg.norm(v1 @ v1.T - v2 @ v2.T))


def stiefel_project(a):
    """Nearest orthonormal frame to a d x m matrix (polar factor U W')."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] < a.shape[1]:
        raise ValueError(f"expected a tall d x m matrix, got shape {a.shape}")
    u, s, wt = np.linalg.svd(a, full_matrices=False)
    if s[-1] <= 1e-12 * max(s[0], 1e-300):
        raise ValueError("matrix is numerically rank deficient; projection "
                         "onto orthonormal frames is not unique")
    return u @ wt
