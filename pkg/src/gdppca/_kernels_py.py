"""Pure-numpy fallback for the compiled iteration kernels.

Mirrors the arithmetic of gdppca._kernels step for step; the compiled
module is preferred at import time when available (see gdppca._backend).
"""

import numpy as np

BACKEND = "numpy"

_SKIP_NORM = 1e-12


def _polar(a):
    # orthonormal polar factor via the m x m Gram eigendecomposition;
    # same map as the SVD-based projection for full-rank a
    c = a.T @ a
    w, u = np.linalg.eigh(c)
    w = np.maximum(w, 1e-300)
    return a @ ((u / np.sqrt(w)) @ u.T)


def nsggd_chunk(z, v, idx, noise, etas):
    """Advance the Stiefel iterate v in place through one chunk of steps.

    Per step k: gather the batch rows, form the true batch gradient of
    the mean point-to-subspace distance (terms with projection residual
    below 1e-12 are skipped), take the noisy Euclidean step, and project
    back to orthonormal columns.
    """
    bsz = idx.shape[1]
    d, m = v.shape
    for k in range(idx.shape[0]):
        xb = z[idx[k]]
        p = xb @ v
        q = xb - p @ v.T
        nrm = np.sqrt(np.einsum("ij,ij->i", q, q))
        g = np.zeros((d, m))
        for b in range(bsz):
            if nrm[b] >= _SKIP_NORM:
                g += np.outer(q[b], p[b]) / nrm[b]
        a = v + etas[k] * (g / bsz - noise[k])
        v[:] = _polar(a)
