"""Generalized Kendall's tau scatter estimators.

Given data rows x_1..x_n and a bounded transform g, the population target
is K_g = E[g(W) g(W)'] with W = (X - X~)/sqrt(2) an independent pair
difference.  Because ||g(W)|| is bounded by sup_norm(g), replacing one
row moves the U-statistic by at most 4 * sup_norm(g)^2 / n in Frobenius
norm, which is the calibration constant for the Gaussian privacy
mechanism layered on top.
"""

from __future__ import annotations

import numpy as np

from . import transforms

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def _check_data(x, min_rows=2):
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"data must be a 2-d array of rows, got shape {x.shape}")
    if x.shape[0] < min_rows:
        raise ValueError(f"need at least {min_rows} rows, got {x.shape[0]}")
    if x.shape[1] < 1:
        raise ValueError("data must have at least one column")
    if not np.all(np.isfinite(x)):
        raise ValueError("data must be finite")
    return x


def kendall_u(x, g):
    """Full second-order U-statistic estimate of K_g.

    Averages g((x_j - x_i)/sqrt(2)) outer products over all n(n-1)/2
    unordered row pairs.  Pairs are accumulated in a fixed order
    (ascending i, then ascending j) so repeated runs on the same input
    are reproducible.

    Parameters
    ----------
    x : (n, d) array
        Data rows, n >= 2, finite.
    g : Transform

    Returns
    -------
    (d, d) ndarray, symmetric positive semidefinite.
    """
    x = _check_data(x)
    n, d = x.shape
    acc = np.zeros((d, d))
    for i in range(n - 1):
        diffs = (x[i + 1 :] - x[i]) * _INV_SQRT2
        rows = transforms.apply_rows(g, diffs)
        acc += rows.T @ rows
    return (acc + acc.T) / (n * (n - 1.0))


def kendall_paired(x, g):
    """Disjoint-pairs estimate of K_g.

    Uses the floor(n/2) differences x_{h+i} - x_i with h = floor(n/2)
    (the last row is discarded when n is odd), so each row enters exactly
    one term.  Cheaper and with smaller per-row sensitivity footprint
    than :func:`kendall_u`, at the cost of averaging n/2 terms instead of
    n(n-1)/2.
    """
    x = _check_data(x)
    n, d = x.shape
    h = n // 2
    diffs = (x[h : 2 * h] - x[:h]) * _INV_SQRT2
    rows = transforms.apply_rows(g, diffs)
    acc = rows.T @ rows
    return (acc + acc.T) / (2.0 * h)


def sensitivity_bound(g, n):
    """Frobenius sensitivity of kendall_u to one row replacement."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    return 4.0 * g.sup_norm**2 / n
