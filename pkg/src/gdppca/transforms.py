"""Generalized spatial-sign transforms.

A transform g maps a vector t to xi(||t||) * t / ||t||, preserving
direction and reweighting length.  Two members are provided:

* spherical: xi(r) = 1, every nonzero vector maps to the unit sphere;
* winsorized(c): xi(r) = min(r, c), the identity inside radius c and a
  clip to length c outside.

Both are bounded, which is what makes pairwise statistics built on them
insensitive to heavy tails and gives finite sensitivity for privacy noise
calibration.  g(0) = 0; wherever a direction must be computed, vectors
with norm below 1e-300 are treated as zero rather than divided by a
denormal (the winsorized fixed region needs no division and returns the
input exactly).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_ZERO_NORM = 1e-300


@dataclass(frozen=True)
class Transform:
    kind: str
    radius: float | None = None

    def __post_init__(self):
        if self.kind == "spherical":
            if self.radius is not None:
                raise ValueError("spherical transform takes no radius")
        elif self.kind == "winsorized":
            if self.radius is None or not np.isfinite(self.radius) or self.radius <= 0:
                raise ValueError(f"winsorization radius must be finite and positive, "
                                 f"got {self.radius}")
        else:
            raise ValueError(f"unknown transform kind {self.kind!r}")

    @property
    def sup_norm(self) -> float:
        """Supremum of ||g(t)|| over all t."""
        return 1.0 if self.kind == "spherical" else float(self.radius)


def spherical() -> Transform:
    return Transform("spherical")


def winsorized(radius: float) -> Transform:
    return Transform("winsorized", float(radius))


def sup_norm(g: Transform) -> float:
    return g.sup_norm


def apply_rows(g: Transform, t):
    """Apply g to each row of a (k, d) array.

    Row norms are computed after factoring out the largest entry
    magnitude so inputs near the float range limits (1e-300, 1e300)
    transform correctly instead of under/overflowing.
    """
    t = np.asarray(t, dtype=float)
    if t.ndim != 2:
        raise ValueError(f"expected a 2-d array of row vectors, got shape {t.shape}")
    factor = np.max(np.abs(t), axis=1, keepdims=True)
    unit = t / np.where(factor > 0, factor, 1.0)
    unorm = np.sqrt(np.einsum("ij,ij->i", unit, unit))[:, None]  # in [1, sqrt(d)]
    norm = factor * unorm
    live = norm >= _ZERO_NORM
    direction = np.where(live, unit / np.where(unorm > 0, unorm, 1.0), 0.0)
    if g.kind == "spherical":
        return direction
    # inside the radius the transform is the identity; return the input
    # rows untouched so the fixed region is exact, not rounded
    return np.where(norm <= g.radius, t, direction * g.radius)


def apply(g: Transform, t):
    """Apply g to a single vector."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 1:
        raise ValueError(f"expected a vector, got shape {t.shape}")
    if not np.all(np.isfinite(t)):
        raise ValueError("input vector must be finite")
    return apply_rows(g, t[None, :])[0]
