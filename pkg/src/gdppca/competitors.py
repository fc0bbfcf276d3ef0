"""Baseline private PCA methods the robust pipeline is compared against.

Three published mechanisms, implemented as stated by their sources:

* Analyze Gauss (AG): center, normalize by the maximum centered row
  norm, add calibrated Gaussian noise to the sample covariance, and
  eigendecompose.  The normalization bounds the covariance sensitivity
  by 6/n but makes the statistic scale-free, so heavy tails crush the
  signal before noise is even added.
* SGPCA: spiked-covariance PCA on pairwise differences with Gaussian
  noise on the top-m projector.  Its sensitivity constant assumes
  Gaussian data with known extreme eigenvalues and holds only with high
  probability, so the privacy guarantee is approximate.
* NSGGD: noisy stochastic gradient descent for least absolute
  deviations subspace recovery on the Stiefel manifold, initialized at
  an AG estimate with half the budget and iterated with per-step
  Gaussian noise.

All three consume a single RngStream and are deterministic given it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg, transforms
from ._backend import kernels
from .kendall import _check_data
from .mechanism import PrivacyBudget
from .rng import RngStream

_CHUNK = 4096


# ------------------------------------------------------------ Analyze Gauss


def analyze_gauss(x, m, budget, rng: RngStream):
    """Analyze Gauss private PCA frame.

    Steps: center by the sample mean; divide by the largest centered row
    norm; form the (n-1)-denominator sample covariance; add symmetric
    Gaussian noise with scale 6 sqrt(2 ln(1.25/delta)) / (n eps) in the
    isometric half-vectorization coordinates; return the top-m
    eigenvectors.
    """
    return _analyze_gauss(x, m, budget, rng.generator())


def _analyze_gauss(x, m, budget, gen):
    x = _check_data(x)
    n, d = x.shape
    if not 1 <= m <= d:
        raise ValueError(f"m must be in [1, {d}], got {m}")
    z = x - x.mean(axis=0)
    rmax = np.linalg.norm(z, axis=1).max()
    if rmax <= 0.0:
        raise ValueError("all rows are identical; the max-norm normalization "
                         "is undefined")
    z = z / rmax
    cov = z.T @ z / (n - 1.0)
    cov = (cov + cov.T) / 2.0
    sigma = 6.0 * math.sqrt(2.0 * math.log(1.25 / budget.delta)) / (n * budget.eps)
    q = d * (d + 1) // 2
    noisy = cov + linalg.vecd_inv(sigma * gen.standard_normal(q), d)
    return linalg.top_m(linalg.eigh(noisy), m)


# ------------------------------------------------------------------ SGPCA


@dataclass(frozen=True)
class SgpcaConfig:
    """Projector sensitivity bound and the rank it was derived for."""

    delta_sens: float
    rank: int

    def __post_init__(self):
        if not (np.isfinite(self.delta_sens) and self.delta_sens > 0):
            raise ValueError(f"delta_sens must be positive, got {self.delta_sens}")
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")


def sgpca_sensitivity(lam1, lam_d, d, n, r):
    """High-probability projector sensitivity for spiked Gaussian data.

    Delta = 4 (lam_d/lam_1 + sqrt(lam_d/lam_1)) sqrt(d (r + ln n)) / n.
    Requires the extreme covariance eigenvalues, which the simulation
    harness takes from the true generating model.
    """
    if not lam1 >= lam_d > 0:
        raise ValueError(f"need lam1 >= lam_d > 0, got ({lam1}, {lam_d})")
    if n < 2 or d < 1 or r < 1:
        raise ValueError(f"bad dimensions (d={d}, n={n}, r={r})")
    ratio = lam_d / lam1
    return 4.0 * (ratio + math.sqrt(ratio)) * math.sqrt(d * (r + math.log(n))) / n


def sgpca(x, m, budget, cfg, rng: RngStream):
    """Spiked-covariance Gaussian PCA with a privatized projector.

    Builds the covariance of the floor(n/2) disjoint pair differences
    (x_{h+i} - x_i)/sqrt(2), takes its top-m frame, perturbs the frame's
    projector with symmetric noise whose every entry (diagonal included)
    has standard deviation delta_sens sqrt(2 log(1.25/delta)) / eps, and
    re-extracts the top-m eigenvectors.

    The resulting privacy guarantee is approximate: delta_sens bounds
    the projector sensitivity only with high probability under the
    spiked Gaussian model.
    """
    x = _check_data(x, min_rows=4)
    n, d = x.shape
    if not 1 <= m <= d:
        raise ValueError(f"m must be in [1, {d}], got {m}")
    gen = rng.generator()
    h = n // 2
    z = (x[h : 2 * h] - x[:h]) / np.sqrt(2.0)
    cov = z.T @ z / h
    cov = (cov + cov.T) / 2.0
    v = linalg.top_m(linalg.eigh(cov), m)
    sd = cfg.delta_sens * math.sqrt(2.0 * math.log(1.25 / budget.delta)) / budget.eps
    e = np.zeros((d, d))
    iu = np.triu_indices(d)
    draws = sd * gen.standard_normal(iu[0].size)
    e[iu] = draws
    e[(iu[1], iu[0])] = draws
    return linalg.top_m(linalg.eigh(v @ v.T + e), m)


# ------------------------------------------------------------------ NSGGD


@dataclass(frozen=True, eq=False)
class NsggdConfig:
    """Iteration schedule for NSGGD.

    iterations may be 0, in which case the method returns its Analyze
    Gauss initializer untouched.  The budget field, when set, must match
    the budget the method is invoked with; it records what the schedule
    was derived for.
    """

    iterations: int
    batch_size: int
    learning_rates: np.ndarray
    budget: PrivacyBudget | None = None

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError(f"iterations must be >= 0, got {self.iterations}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        rates = np.asarray(self.learning_rates, dtype=float)
        if rates.shape != (self.iterations,):
            raise ValueError(f"learning_rates must have length {self.iterations}, "
                             f"got shape {rates.shape}")
        if self.iterations and not (np.isfinite(rates).all() and (rates > 0).all()):
            raise ValueError("learning rates must be finite and positive")
        object.__setattr__(self, "learning_rates", rates)


def nsggd_defaults(n, budget, iterations=None):
    """Published schedule, capped for tractability.

    T defaults to min(n^2, 200 n) (the source sets T = n^2, which is out
    of reach for repeated desk-scale runs; the cap is recorded by the
    harness in its output).  B = max(floor(n sqrt(eps / (8 T))), 1) and
    a constant learning rate 1/n^2.
    """
    if n < 4:
        raise ValueError(f"need n >= 4, got {n}")
    t = min(n * n, 200 * n) if iterations is None else int(iterations)
    if t < 0:
        raise ValueError(f"iterations must be >= 0, got {t}")
    b = max(int(n * math.sqrt(budget.eps / (8.0 * t))), 1) if t > 0 else 1
    rates = np.full(t, 1.0 / (n * n))
    return NsggdConfig(iterations=t, batch_size=b, learning_rates=rates, budget=budget)


def nsggd_sigma(n_half, iterations, batch_size, budget):
    """Per-iteration noise scale at the post-split budget.

    Uses eps' = eps/2, delta' = delta/2 and the paired sample size
    n_half (the gradient dataset has n_half records):
    sigma = B sqrt(2 T log(1/delta')) / (n_half^2 eps').
    """
    if iterations == 0:
        return 0.0
    eps_p = budget.eps / 2.0
    delta_p = budget.delta / 2.0
    return (batch_size * math.sqrt(2.0 * iterations * math.log(1.0 / delta_p))
            / (n_half * n_half * eps_p))


def nsggd_objective(z, v):
    """Mean distance of the rows of z to the column span of v."""
    p = z @ v
    q = z - p @ v.T
    return float(np.linalg.norm(q, axis=1).mean())


def _nsggd_gradient(v, batch):
    """True batch gradient of :func:`nsggd_objective` at frame v.

    Terms whose projection residual norm falls below 1e-12 are skipped;
    in particular batch points inside the span of v contribute nothing.
    """
    p = batch @ v
    q = batch - p @ v.T
    nrm = np.sqrt(np.einsum("ij,ij->i", q, q))
    g = np.zeros(v.shape)
    for b in range(batch.shape[0]):
        if nrm[b] >= 1e-12:
            g -= np.outer(q[b], p[b]) / nrm[b]
    return g / batch.shape[0]


def nsggd(x, m, budget, cfg, rng: RngStream):
    """Noisy stochastic gradient descent PCA on the Stiefel manifold.

    Pipeline: normalize the floor(n/2) disjoint pair differences to unit
    vectors (zero differences become zero rows and never contribute a
    gradient term); split the budget evenly between an Analyze Gauss
    initializer on that pair dataset and the iteration noise; run
    cfg.iterations noisy projected gradient steps on the mean absolute
    deviation objective, with batches of cfg.batch_size drawn uniformly
    with replacement.

    Stream consumption order: initializer noise first, then per chunk of
    up to 4096 iterations all batch indices followed by all noise
    matrices.  This order is fixed across kernel backends.
    """
    x = _check_data(x, min_rows=4)
    n, d = x.shape
    if not 1 <= m <= d:
        raise ValueError(f"m must be in [1, {d}], got {m}")
    if cfg.budget is not None and cfg.budget != budget:
        raise ValueError(f"config was derived for {cfg.budget}, invoked with {budget}")
    h = n // 2
    z = transforms.apply_rows(transforms.spherical(), x[h : 2 * h] - x[:h])
    half = PrivacyBudget(budget.eps / 2.0, budget.delta / 2.0)
    gen = rng.generator()
    v = np.ascontiguousarray(_analyze_gauss(z, m, half, gen))
    t = cfg.iterations
    if t == 0:
        return v
    sigma = nsggd_sigma(h, t, cfg.batch_size, budget)
    z = np.ascontiguousarray(z)
    rates = cfg.learning_rates
    done = 0
    while done < t:
        c = min(t - done, _CHUNK)
        idx = gen.integers(0, h, size=(c, cfg.batch_size))
        noise = sigma * gen.standard_normal((c, d, m))
        kernels.nsggd_chunk(z, v, np.ascontiguousarray(idx),
                            np.ascontiguousarray(noise),
                            np.ascontiguousarray(rates[done : done + c]))
        done += c
    return v
