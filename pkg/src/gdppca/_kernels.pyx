# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled iteration kernels.

Mirrors the arithmetic of gdppca._kernels_py step for step.  The m x m
Gram eigendecomposition inside the polar projection uses a cyclic Jacobi
sweep instead of LAPACK, so the two backends agree to rounding level per
step rather than bit for bit.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()

BACKEND = "compiled"

_SKIP_NORM = 1e-12

cdef double SKIP_NORM_C = 1e-12


cdef void _jacobi_eigh(double[:, ::1] c, double[:, ::1] u, double[::1] w,
                       Py_ssize_t m) noexcept nogil:
    """Eigendecomposition of the symmetric matrix c (destroyed in place).

    Eigenvectors accumulate into u (columns), eigenvalues into w.  Cyclic
    Jacobi converges quadratically; 50 sweeps is far beyond what any
    well-scaled Gram matrix of modest size needs.
    """
    cdef Py_ssize_t p, q, r, sweep
    cdef double off, scale, apq, app, aqq, theta, t, cs, sn, tmp

    for p in range(m):
        for q in range(m):
            u[p, q] = 1.0 if p == q else 0.0

    for sweep in range(50):
        off = 0.0
        scale = 0.0
        for p in range(m):
            scale += fabs(c[p, p])
            for q in range(p + 1, m):
                off += c[p, q] * c[p, q]
        if off <= 1e-30 * (scale * scale + 1e-300):
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = c[p, q]
                if fabs(apq) <= 1e-300:
                    continue
                app = c[p, p]
                aqq = c[q, q]
                theta = 0.5 * (aqq - app) / apq
                if theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                cs = 1.0 / sqrt(t * t + 1.0)
                sn = t * cs
                c[p, p] = app - t * apq
                c[q, q] = aqq + t * apq
                c[p, q] = 0.0
                c[q, p] = 0.0
                for r in range(m):
                    if r != p and r != q:
                        tmp = c[r, p]
                        c[r, p] = cs * tmp - sn * c[r, q]
                        c[r, q] = sn * tmp + cs * c[r, q]
                        c[p, r] = c[r, p]
                        c[q, r] = c[r, q]
                for r in range(m):
                    tmp = u[r, p]
                    u[r, p] = cs * tmp - sn * u[r, q]
                    u[r, q] = sn * tmp + cs * u[r, q]
    for p in range(m):
        w[p] = c[p, p]


def nsggd_chunk(double[:, ::1] z, double[:, ::1] v, cnp.int64_t[:, ::1] idx,
                double[:, :, ::1] noise, double[::1] etas):
    """Advance the Stiefel iterate v in place through one chunk of steps.

    Per step k: gather the batch rows, form the true batch gradient of
    the mean point-to-subspace distance (terms with projection residual
    below 1e-12 are skipped), take the noisy Euclidean step, and project
    back to orthonormal columns.
    """
    cdef Py_ssize_t nsteps = idx.shape[0]
    cdef Py_ssize_t bsz = idx.shape[1]
    cdef Py_ssize_t d = v.shape[0]
    cdef Py_ssize_t m = v.shape[1]
    cdef Py_ssize_t k, b, i, j, t, row
    cdef double s, nrm_b, inv, eta

    p_arr = np.empty((bsz, m))
    q_arr = np.empty((bsz, d))
    nrm_arr = np.empty(bsz)
    g_arr = np.empty((d, m))
    a_arr = np.empty((d, m))
    c_arr = np.empty((m, m))
    u_arr = np.empty((m, m))
    w_arr = np.empty(m)
    f_arr = np.empty((m, m))

    cdef double[:, ::1] p = p_arr
    cdef double[:, ::1] q = q_arr
    cdef double[::1] nrm = nrm_arr
    cdef double[:, ::1] g = g_arr
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] c = c_arr
    cdef double[:, ::1] u = u_arr
    cdef double[::1] w = w_arr
    cdef double[:, ::1] f = f_arr

    with nogil:
        for k in range(nsteps):
            for b in range(bsz):
                row = idx[k, b]
                for j in range(m):
                    s = 0.0
                    for i in range(d):
                        s += z[row, i] * v[i, j]
                    p[b, j] = s
                s = 0.0
                for i in range(d):
                    q[b, i] = z[row, i]
                    for j in range(m):
                        q[b, i] -= p[b, j] * v[i, j]
                    s += q[b, i] * q[b, i]
                nrm[b] = sqrt(s)
            for i in range(d):
                for j in range(m):
                    g[i, j] = 0.0
            for b in range(bsz):
                nrm_b = nrm[b]
                if nrm_b >= SKIP_NORM_C:
                    for i in range(d):
                        for j in range(m):
                            g[i, j] += (q[b, i] * p[b, j]) / nrm_b
            eta = etas[k]
            for i in range(d):
                for j in range(m):
                    a[i, j] = v[i, j] + eta * (g[i, j] / bsz - noise[k, i, j])
            # polar factor via the m x m Gram eigendecomposition
            for i in range(m):
                for j in range(i, m):
                    s = 0.0
                    for t in range(d):
                        s += a[t, i] * a[t, j]
                    c[i, j] = s
                    c[j, i] = s
            _jacobi_eigh(c, u, w, m)
            for t in range(m):
                if w[t] < 1e-300:
                    w[t] = 1e-300
            for i in range(m):
                for j in range(m):
                    s = 0.0
                    for t in range(m):
                        s += (u[i, t] / sqrt(w[t])) * u[j, t]
                    f[i, j] = s
            for i in range(d):
                for j in range(m):
                    s = 0.0
                    for t in range(m):
                        s += a[i, t] * f[t, j]
                    v[i, j] = s
