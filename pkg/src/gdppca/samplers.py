"""Synthetic data models for the simulation study.

All models share one spiked covariance family: two planted unit-norm
spike directions v1 perpendicular v2 on top of an isotropic bulk,

    Sigma = (lam1 - lamr) v1 v1' + (lam2 - lamr) v2 v2' + lamr I,

whose spectrum is {lam1, lam2, lamr, ..., lamr}.  Rows are drawn either
Gaussian, heavy-tailed elliptical (multivariate t with 1 degree of
freedom, i.e. no moments), or Gaussian with a fraction of rows replaced
by clustered outliers far from the bulk and orthogonal to the spikes.

Sampling is deterministic given an RngStream; the draw order per model
is documented in :func:`sample` and is part of the reproducibility
contract.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .rng import RngStream

GAUSSIAN = "gaussian"
STUDENT_T1 = "student_t1"
CONTAMINATED = "contaminated"
MODEL_KINDS = (GAUSSIAN, STUDENT_T1, CONTAMINATED)


@dataclass(frozen=True)
class SpikedModel:
    """Two-spike covariance model."""

    d: int
    lam1: float
    lam2: float
    lamr: float
    v1: np.ndarray
    v2: np.ndarray

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"need d >= 2, got {self.d}")
        if not self.lam1 > self.lam2 > self.lamr > 0:
            raise ValueError("eigenvalues must satisfy lam1 > lam2 > lamr > 0, "
                             f"got {(self.lam1, self.lam2, self.lamr)}")
        for name, v in (("v1", self.v1), ("v2", self.v2)):
            if np.asarray(v).shape != (self.d,):
                raise ValueError(f"{name} must have shape ({self.d},)")
        if abs(np.linalg.norm(self.v1) - 1) > 1e-10 or \
           abs(np.linalg.norm(self.v2) - 1) > 1e-10:
            raise ValueError("spike directions must be unit vectors")
        if abs(float(self.v1 @ self.v2)) > 1e-10:
            raise ValueError("spike directions must be orthogonal")

    def covariance(self):
        return ((self.lam1 - self.lamr) * np.outer(self.v1, self.v1)
                + (self.lam2 - self.lamr) * np.outer(self.v2, self.v2)
                + self.lamr * np.eye(self.d))

    def spike_frame(self):
        """d x 2 frame spanning the planted subspace."""
        return np.column_stack([self.v1, self.v2])

    def eigenvalues(self):
        w = np.full(self.d, self.lamr)
        w[0], w[1] = self.lam1, self.lam2
        return w


def benchmark_model(d):
    """The fixed spiked model used across the simulation grids.

    Spectrum (10, 5, 1, ..., 1); spikes v1 = (1,1,1,1,0,...)/2 and
    v2 = (1,-1,1,-1,0,...)/2.  Requires d >= 4.
    """
    if d < 4:
        raise ValueError(f"benchmark model needs d >= 4, got {d}")
    v1 = np.zeros(d)
    v2 = np.zeros(d)
    v1[:4] = 0.5
    v2[:4] = [0.5, -0.5, 0.5, -0.5]
    return SpikedModel(d=d, lam1=10.0, lam2=5.0, lamr=1.0, v1=v1, v2=v2)


@dataclass(frozen=True)
class DataModel:
    """A spiked model plus a row distribution around it."""

    kind: str
    spike: SpikedModel
    contamination_rate: float = 0.05
    outlier_sd: float = 0.05

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; "
                             f"expected one of {MODEL_KINDS}")
        if not 0 < self.contamination_rate < 1:
            raise ValueError(f"contamination rate must be in (0, 1), "
                             f"got {self.contamination_rate}")

    def outlier_center(self):
        """Outlier cluster center: norm 2.5*lam1, orthogonal to both spikes."""
        d = self.spike.d
        if d < 4:
            raise ValueError("outlier center needs d >= 4")
        u = np.zeros(d)
        u[1], u[3] = 1.0, -1.0
        u /= np.sqrt(2.0)
        return 2.5 * self.spike.lam1 * u


def gaussian_model(spike):
    return DataModel(GAUSSIAN, spike)


def student_t1_model(spike):
    return DataModel(STUDENT_T1, spike)


def contaminated_model(spike, rate=0.05):
    return DataModel(CONTAMINATED, spike, contamination_rate=rate)


def sqrt_psd(a):
    """Symmetric square root of a PSD matrix.

    Eigenvalues in [-1e-8, 0) are clamped to zero; anything lower raises.
    """
    pairs = linalg.eigh(a)
    w = pairs.values.copy()
    if w.min() < -1e-8:
        raise ValueError(f"matrix is not positive semidefinite "
                         f"(smallest eigenvalue {w.min():.3e})")
    w[w < 0] = 0.0
    r = (pairs.vectors * np.sqrt(w)) @ pairs.vectors.T
    return (r + r.T) / 2.0


def sample(model, n, rng: RngStream):
    """Draw an (n, d) dataset from a DataModel.

    Draw order on the stream (fixed, part of the output contract):
    base normals (n x d, row-major), then the t1 divisor normals (n) if
    heavy-tailed, then the outlier row choice and outlier normals
    (k x d) if contaminated.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    gen = rng.generator()
    root = sqrt_psd(model.spike.covariance())
    x = gen.standard_normal((n, model.spike.d)) @ root
    if model.kind == STUDENT_T1:
        w = gen.standard_normal(n)
        x /= np.maximum(np.abs(w), 1e-300)[:, None]
    elif model.kind == CONTAMINATED:
        k = int(np.floor(model.contamination_rate * n))
        if k > 0:
            idx = gen.choice(n, size=k, replace=False)
            center = model.outlier_center()
            x[idx] = center + model.outlier_sd * gen.standard_normal((k, model.spike.d))
    return x
