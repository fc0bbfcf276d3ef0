"""Monte Carlo cross-checks tying the estimators to closed-form targets.

For elliptical data with scatter eigenvalues lam_1 >= ... >= lam_d the
population Kendall's tau matrix shares the scatter's eigenvectors, with
eigenvalues

* spherical transform:   phi_l = E[ lam_l Y_l^2 / sum_j lam_j Y_j^2 ],
  Y standard Gaussian (the ratio only depends on the direction of Y, so
  it is the same for every elliptical generator);
* winsorized (radius c): phi_l = E[ min(R^2, c^2 / q) lam_l S_l^2 ],
  with S uniform on the sphere, q = sum_j lam_j S_j^2, and R^2 the
  squared elliptical radius of a scaled independent pair difference
  (chi-square with d degrees of freedom in the Gaussian case),

together with the two-sided bound

  P(R^2 >= c^2 / lam_d) * c^2 * phi_sph_l  <=  phi_wins_l  <=  c^2 * phi_sph_l.

These identities give independent oracles for everything downstream:
eigenvalues of the U-statistic must agree with the phi values, and
corruption of an alpha-fraction of rows can move the estimated subspace
by at most 8 alpha sup_norm(g)^2 over the spectral gap.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from . import kendall, linalg
from .rng import RngStream
from .samplers import GAUSSIAN, STUDENT_T1

_CHUNK = 1 << 17


class McEstimate(NamedTuple):
    """Monte Carlo mean with its standard error."""

    value: float
    std_error: float
    samples: int


def _check_eigvals(eigvals):
    w = np.asarray(eigvals, dtype=float)
    if w.ndim != 1 or w.size < 2:
        raise ValueError(f"need a vector of at least 2 eigenvalues, got shape {w.shape}")
    if np.any(np.diff(w) > 0):
        raise ValueError("eigenvalues must be nonincreasing")
    if w[-1] <= 0:
        raise ValueError("eigenvalues must be positive")
    return w


def _check_ell(ell, d):
    if not 1 <= ell <= d:
        raise ValueError(f"ell is 1-based and must be in [1, {d}], got {ell}")
    return ell - 1


def _mc_from_sums(total, total_sq, n):
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0)
    return McEstimate(float(mean), float(np.sqrt(var / n)), n)


def phi_sph(eigvals, ell, samples, rng: RngStream):
    """Monte Carlo estimate of the spherical Kendall eigenvalue phi_l.

    `ell` is 1-based to match the spectral ordering phi_1 >= ... >= phi_d.
    Draws are consumed in fixed-size chunks from the stream, so calls
    with the same stream share the same underlying draws; summing the
    estimates over all ell then telescopes to 1 exactly.
    """
    w = _check_eigvals(eigvals)
    k = _check_ell(ell, w.size)
    gen = rng.generator()
    total = total_sq = 0.0
    left = int(samples)
    if left < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    while left > 0:
        c = min(left, _CHUNK)
        y2 = gen.standard_normal((c, w.size)) ** 2
        vals = w[k] * y2[:, k] / (y2 @ w)
        total += vals.sum()
        total_sq += (vals * vals).sum()
        left -= c
    return _mc_from_sums(total, total_sq, int(samples))


def _radius_sq_chunk(kind, d, c, gen):
    """Squared elliptical radius of (X - X~)/sqrt(2) in whitened coordinates."""
    z = gen.standard_normal((c, d))
    zt = gen.standard_normal((c, d))
    if kind == GAUSSIAN:
        diff = z - zt
    elif kind == STUDENT_T1:
        w1 = np.maximum(np.abs(gen.standard_normal(c)), 1e-300)
        w2 = np.maximum(np.abs(gen.standard_normal(c)), 1e-300)
        diff = z / w1[:, None] - zt / w2[:, None]
    else:
        raise ValueError(f"no radial law for model kind {kind!r}")
    return 0.5 * np.einsum("ij,ij->i", diff, diff)


def phi_wins(eigvals, ell, radius, kind, samples, rng: RngStream):
    """Monte Carlo estimate of the winsorized Kendall eigenvalue phi_l.

    `kind` selects the elliptical generator of the data ("gaussian" or
    "student_t1"), which enters only through the law of the pair radius.
    Draw order per chunk: sphere normals, then the two radius normals,
    then the radius divisors for the heavy-tailed case.
    """
    w = _check_eigvals(eigvals)
    k = _check_ell(ell, w.size)
    if not (np.isfinite(radius) and radius > 0):
        raise ValueError(f"radius must be finite and positive, got {radius}")
    gen = rng.generator()
    total = total_sq = 0.0
    left = int(samples)
    if left < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    while left > 0:
        c = min(left, _CHUNK)
        s = gen.standard_normal((c, w.size))
        s2 = s * s
        q = s2 @ w
        norm2 = s2.sum(axis=1)
        r_sq = _radius_sq_chunk(kind, w.size, c, gen)
        # S_l^2 for the uniform sphere direction is s_l^2 / ||s||^2
        vals = np.minimum(r_sq, radius * radius * norm2 / q) * w[k] * s2[:, k] / norm2
        total += vals.sum()
        total_sq += (vals * vals).sum()
        left -= c
    return _mc_from_sums(total, total_sq, int(samples))


class SandwichCheck(NamedTuple):
    """Shared-draw Monte Carlo rendering of the winsorized two-sided bound."""

    lower: McEstimate
    wins: McEstimate
    upper: McEstimate
    exceed_prob: float  # P(R^2 >= c^2 / lam_d) estimate on the same draws


def winsorized_sandwich(eigvals, ell, radius, kind, samples, rng: RngStream):
    """Estimate lower bound, phi_wins, and upper bound from shared draws.

    The upper bound min(R^2, c^2/q) <= c^2/q holds pointwise on every
    draw, so wins.value <= upper.value exactly; the lower bound holds in
    expectation and needs its standard errors.
    """
    w = _check_eigvals(eigvals)
    k = _check_ell(ell, w.size)
    gen = rng.generator()
    sums = np.zeros(3)
    sums_sq = np.zeros(3)
    exceed = 0.0
    left = int(samples)
    if left < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    r2 = radius * radius
    while left > 0:
        c = min(left, _CHUNK)
        s = gen.standard_normal((c, w.size))
        s2 = s * s
        q = s2 @ w
        norm2 = s2.sum(axis=1)
        r_sq = _radius_sq_chunk(kind, w.size, c, gen)
        sph = w[k] * s2[:, k] / q  # direction-only, equals the phi_sph integrand
        wins = np.minimum(r_sq, r2 * norm2 / q) * w[k] * s2[:, k] / norm2
        hit = (r_sq >= r2 / w[-1]).astype(float)
        low = hit * r2 * sph
        for i, v in enumerate((low, wins, r2 * sph)):
            sums[i] += v.sum()
            sums_sq[i] += (v * v).sum()
        exceed += hit.sum()
        left -= c
    n = int(samples)
    low, wins, up = (_mc_from_sums(sums[i], sums_sq[i], n) for i in range(3))
    return SandwichCheck(low, wins, up, exceed / n)


def breakdown_bound(k_hat, g, m):
    """Largest corrupted fraction certified harmless by the observed gap.

    Equals (phi_hat_m - phi_hat_{m+1}) / (8 sup_norm(g)^2): below this
    fraction the corruption inequality keeps the subspace deviation
    under 1.
    """
    pairs = linalg.eigh(np.asarray(k_hat, dtype=float))
    d = pairs.values.size
    if not 1 <= m < d:
        raise ValueError(f"m must be in [1, {d - 1}], got {m}")
    gap = pairs.values[m - 1] - pairs.values[m]
    return float(gap / (8.0 * g.sup_norm**2))


class CorruptionReport(NamedTuple):
    passed: bool
    bound: float
    worst_deviation: float
    worst_attack: str
    trials: int


_ATTACKS = ("spike", "duplicate", "tiny", "mixed")


def _attack_rows(attack, x, r, gen):
    d = x.shape[1]
    if attack == "spike":
        dirs = gen.standard_normal((r, d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        return 1e6 * dirs
    if attack == "duplicate":
        return np.repeat(x[gen.integers(x.shape[0])][None, :], r, axis=0)
    if attack == "tiny":
        return 1e-12 * gen.standard_normal((r, d))
    half = r // 2
    return np.vstack([_attack_rows("spike", x, half, gen),
                      _attack_rows("tiny", x, r - half, gen)])


def corruption_deviation_check(x, g, m, alpha, trials, rng: RngStream):
    """Verify the corruption inequality on adversarial row replacements.

    Replaces floor(alpha n) rows with attack rows drawn from a menu of
    stress patterns (huge-norm spikes in random directions, duplicated
    records, near-zero records, and a mix), recomputes the top-m
    eigenframe of kendall_u, and checks

        sin_theta(corrupted frame, clean frame)
            <= 8 alpha sup_norm(g)^2 / (phi_hat_m - phi_hat_{m+1})

    with the gap taken from the clean estimate, on every trial (small
    additive slack 1e-10 for rounding).
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    r = int(np.floor(alpha * n))
    if r < 1:
        raise ValueError(f"alpha={alpha} corrupts no rows at n={n}")
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    k_clean = kendall.kendall_u(x, g)
    pairs = linalg.eigh(k_clean)
    gap = pairs.values[m - 1] - pairs.values[m]
    if gap <= 0:
        raise ValueError("spectral gap at m is zero; the bound is undefined")
    v_clean = linalg.top_m(pairs, m)
    bound = 8.0 * alpha * g.sup_norm**2 / gap
    gen = rng.generator()
    worst = -1.0
    worst_attack = ""
    passed = True
    for t in range(trials):
        attack = _ATTACKS[t % len(_ATTACKS)]
        y = x.copy()
        idx = gen.choice(n, size=r, replace=False)
        y[idx] = _attack_rows(attack, x, r, gen)
        dev = linalg.sin_theta(
            linalg.top_m(linalg.eigh(kendall.kendall_u(y, g)), m), v_clean
        )
        if dev > worst:
            worst, worst_attack = dev, attack
        if dev > bound + 1e-10:
            passed = False
    return CorruptionReport(passed, bound, worst, worst_attack, trials)


class SpectrumAgreement(NamedTuple):
    ell: int
    mc: McEstimate
    eig_mean: float
    eig_se: float

    @property
    def gap(self) -> float:
        return abs(self.mc.value - self.eig_mean)

    @property
    def combined_se(self) -> float:
        return float(np.hypot(self.mc.std_error, self.eig_se))


def sph_spectrum_agreement(model, n, reps, ells, samples, rng: RngStream):
    """Compare kendall_u(spherical) eigenvalues with phi_sph estimates.

    Draws `reps` independent datasets of n rows from the data model and
    pools their spherical U-statistics into one averaged matrix before
    eigendecomposing.  The eigenvalue bias of a single draw is quadratic
    in its estimation error, so pooling the matrices first shrinks that
    bias by 1/reps, where averaging per-draw eigenvalues would keep it
    intact; the quoted standard error is the delta-method one, from the
    per-draw quadratic forms u' K_r u at the pooled eigenvectors.
    """
    from . import samplers, transforms  # local import to avoid cycles

    w = model.spike.eigenvalues()
    mats = []
    for rep in range(reps):
        x = samplers.sample(model, n, rng.child("data", rep))
        mats.append(kendall.kendall_u(x, transforms.spherical()))
    pooled = linalg.eigh(sum(mats) / reps)
    out = []
    for ell in ells:
        mc = phi_sph(w, ell, samples, rng.child("mc", ell))
        u = pooled.vectors[:, ell - 1]
        forms = np.array([u @ k @ u for k in mats])
        se = float(forms.std(ddof=1) / np.sqrt(reps)) if reps > 1 else 0.0
        out.append(SpectrumAgreement(ell, mc, float(pooled.values[ell - 1]), se))
    return out


class SensitivityReport(NamedTuple):
    passed: bool
    bound: float
    worst_deviation: float
    swaps: int


def kendall_sensitivity_search(g, n, d, swaps, rng: RngStream):
    """Random search for neighbor-swap violations of the kendall_u bound.

    Replaces one row of a standard normal dataset with adversarial
    candidates (fresh normals, rows rescaled by factors up to e^6, exact
    duplicates of other rows, zeros) and checks every swap against

        ||K_hat(S) - K_hat(S')||_F <= 4 sup_norm(g)^2 / n

    which holds for arbitrary replacement rows because the transform
    bounds each pair's contribution.  Small additive slack 1e-10.
    """
    if swaps < 1:
        raise ValueError(f"need at least one swap, got {swaps}")
    gen = rng.generator()
    x = gen.standard_normal((n, d))
    base = kendall.kendall_u(x, g)
    bound = kendall.sensitivity_bound(g, n)
    worst = -1.0
    for t in range(swaps):
        row = gen.standard_normal(d)
        kind = t % 4
        if kind == 1:
            row *= np.exp(gen.uniform(-2.0, 6.0))
        elif kind == 2:
            row = x[gen.integers(n)]
        elif kind == 3:
            row = np.zeros(d)
        y = x.copy()
        y[gen.integers(n)] = row
        dev = float(np.linalg.norm(kendall.kendall_u(y, g) - base))
        worst = max(worst, dev)
    return SensitivityReport(worst <= bound + 1e-10, bound, worst, swaps)


def ag_sensitivity_search(n, d, swaps, rng: RngStream):
    """Random search for violations of the 6/n analyze-gauss bound.

    The bound covers the normalized statistic: rows already centered and
    scaled into the unit ball with the normalization constant shared by
    both neighbors (the proof treats the scale as fixed, and the noise
    is calibrated to the post-normalization covariance).  Swaps replace
    one unit-ball row with another, mixing interior and boundary
    candidates, and check

        ||Sigma_hat(S) - Sigma_hat(S')||_F <= 6 / n

    for Sigma_hat = (n-1)^{-1} sum z_i z_i'.  Small additive slack 1e-10.
    """
    if swaps < 1:
        raise ValueError(f"need at least one swap, got {swaps}")
    gen = rng.generator()
    x = gen.standard_normal((n, d))
    z = x - x.mean(axis=0)
    z /= np.linalg.norm(z, axis=1).max()
    base = z.T @ z / (n - 1)
    bound = 6.0 / n
    worst = -1.0
    for t in range(swaps):
        row = gen.standard_normal(d)
        row /= np.linalg.norm(row)
        if t % 2 == 0:
            row *= gen.uniform() ** (1.0 / d)
        y = z.copy()
        y[gen.integers(n)] = row
        dev = float(np.linalg.norm(y.T @ y / (n - 1) - base))
        worst = max(worst, dev)
    return SensitivityReport(worst <= bound + 1e-10, bound, worst, swaps)
