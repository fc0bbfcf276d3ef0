"""Gaussian mechanism for symmetric matrices and the private PCA pipeline.

Noise is added in the isometric half-vectorization coordinates (see
:func:`gdppca.linalg.vecd`), i.e. independent N(0, sigma^2) on each of
the d(d+1)/2 coordinates.  Mapped back to matrix space this puts
variance sigma^2 on diagonal entries and sigma^2/2 on off-diagonal
entries, and calibrating sigma to the Frobenius sensitivity of the input
statistic yields an (eps, delta) guarantee.  Eigenvector extraction
afterwards is post-processing and spends no additional budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kendall, linalg
from .rng import RngStream


@dataclass(frozen=True)
class PrivacyBudget:
    """(eps, delta) differential-privacy budget."""

    eps: float
    delta: float

    def __post_init__(self):
        if not (np.isfinite(self.eps) and self.eps > 0):
            raise ValueError(f"eps must be finite and positive, got {self.eps}")
        if not (0 < self.delta < 1):
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")


def sigma_for(g, n, budget):
    """Noise scale for privatizing kendall_u on n rows under the budget.

    sigma = 4 * sup_norm(g)^2 * sqrt(2 ln(1.25/delta)) / (n * eps),
    the Gaussian-mechanism scale for Frobenius sensitivity
    4 * sup_norm(g)^2 / n.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    sens = kendall.sensitivity_bound(g, n)
    return sens * math.sqrt(2.0 * math.log(1.25 / budget.delta)) / budget.eps


def sym_noise(d, sigma, gen):
    """Symmetric noise matrix: N(0, sigma^2 I) in vecd coordinates."""
    q = d * (d + 1) // 2
    return linalg.vecd_inv(sigma * gen.standard_normal(q), d)


def gauss_mech(a, sigma, rng: RngStream):
    """Add calibrated symmetric Gaussian noise to a symmetric matrix."""
    a = np.asarray(a, dtype=float)
    if not (np.isfinite(sigma) and sigma > 0):
        raise ValueError(f"sigma must be finite and positive, got {sigma}")
    return a + sym_noise(a.shape[0], sigma, rng.generator())


def g_dppca(x, g, m, budget, rng: RngStream):
    """Differentially private robust PCA frame.

    Pipeline: kendall_u scatter -> Gaussian mechanism at the scatter's
    sensitivity -> leading-m eigenvectors.  The output is (eps, delta)-DP
    with respect to single-row replacement of x.

    Parameters
    ----------
    x : (n, d) array
    g : Transform
    m : int
        Number of components, 1 <= m <= d.
    budget : PrivacyBudget
    rng : RngStream

    Returns
    -------
    (d, m) ndarray with orthonormal columns.
    """
    x = np.asarray(x, dtype=float)
    k_hat = kendall.kendall_u(x, g)
    k_priv = gauss_mech(k_hat, sigma_for(g, x.shape[0], budget), rng)
    return linalg.top_m(linalg.eigh(k_priv), m)
