# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled bootstrap inner loop.

Per multiplier row: perturb the stacked moment vector by the scaled
block-sum combination, rebuild the small symmetric Gram, eigendecompose it
with cyclic Jacobi rotations (which yields the exact spectral reciprocal
condition number for the validity check), and solve for the target
coefficient through the eigenbasis. Serial and allocation-free inside the
loop, so replicate j depends only on multiplier row j.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, isfinite, sqrt

cnp.import_array()


cdef int _jacobi_eigh(double* a, double* q, double* lam, Py_ssize_t k) noexcept nogil:
    """Eigendecomposition of the symmetric k-by-k matrix ``a`` (row-major).

    ``a`` is destroyed; eigenvalues land in ``lam`` and eigenvectors in the
    columns of ``q``. Returns 0 on convergence, 1 otherwise.
    """
    cdef Py_ssize_t i, j, p, r, sweep
    cdef double off, fro, apq, app, aqq, theta, t, c, s, tau, aip, aiq
    cdef bint converged = 0

    for i in range(k):
        for j in range(k):
            q[i * k + j] = 1.0 if i == j else 0.0
    if k == 1:
        lam[0] = a[0]
        return 0

    for sweep in range(64):
        off = 0.0
        fro = 0.0
        for i in range(k):
            for j in range(k):
                fro += a[i * k + j] * a[i * k + j]
                if i != j:
                    off += a[i * k + j] * a[i * k + j]
        if off <= 1e-28 * fro:
            converged = 1
            break
        for p in range(k - 1):
            for r in range(p + 1, k):
                apq = a[p * k + r]
                if apq == 0.0:
                    continue
                theta = (a[r * k + r] - a[p * k + p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                app = a[p * k + p]
                aqq = a[r * k + r]
                a[p * k + p] = app - t * apq
                a[r * k + r] = aqq + t * apq
                a[p * k + r] = 0.0
                a[r * k + p] = 0.0
                for i in range(k):
                    if i != p and i != r:
                        aip = a[i * k + p]
                        aiq = a[i * k + r]
                        a[i * k + p] = aip - s * (aiq + tau * aip)
                        a[i * k + r] = aiq + s * (aip - tau * aiq)
                        a[p * k + i] = a[i * k + p]
                        a[r * k + i] = a[i * k + r]
                for i in range(k):
                    aip = q[i * k + p]
                    aiq = q[i * k + r]
                    q[i * k + p] = aip - s * (aiq + tau * aip)
                    q[i * k + r] = aiq + s * (aip - tau * aiq)

    for i in range(k):
        lam[i] = a[i * k + i]
    return 0 if converged else 1


def bootstrap_replicates(double[::1] psi_vec, double[:, ::1] block_sums,
                         double scale, double[:, ::1] multipliers,
                         Py_ssize_t k, Py_ssize_t target, double rcond_min):
    """Compiled counterpart of ``py_kernels.bootstrap_replicates``."""
    cdef Py_ssize_t n_draws = multipliers.shape[0]
    cdef Py_ssize_t n_blocks = multipliers.shape[1]
    cdef Py_ssize_t d = psi_vec.shape[0]
    cdef Py_ssize_t n_gram = d - k

    if block_sums.shape[0] != n_blocks or block_sums.shape[1] != d:
        raise ValueError("block_sums shape does not match multipliers/psi")
    if n_gram != (k * (k + 1)) // 2:
        raise ValueError("psi length inconsistent with k")
    if not 0 <= target < k:
        raise ValueError("target out of range")

    out_arr = np.full(n_draws, np.nan)
    valid_arr = np.zeros(n_draws, dtype=np.uint8)
    work = np.empty(d)
    gmat = np.empty(k * k)
    qmat = np.empty(k * k)
    lam = np.empty(k)

    cdef double[::1] out = out_arr
    cdef unsigned char[::1] valid = valid_arr
    cdef double[::1] v = work
    cdef double[::1] g = gmat
    cdef double[::1] q = qmat
    cdef double[::1] lv = lam
    cdef Py_ssize_t j, b, t, a, bb, idx, r
    cdef double e, lmax, lmin, al, rc, acc, dotc

    with nogil:
        for j in range(n_draws):
            for t in range(d):
                v[t] = psi_vec[t]
            for b in range(n_blocks):
                e = scale * multipliers[j, b]
                for t in range(d):
                    v[t] += e * block_sums[b, t]
            idx = 0
            for a in range(k):
                for bb in range(a, k):
                    g[a * k + bb] = v[idx]
                    g[bb * k + a] = v[idx]
                    idx += 1
            if _jacobi_eigh(&g[0], &q[0], &lv[0], k) != 0:
                continue
            lmax = 0.0
            lmin = fabs(lv[0])
            for a in range(k):
                al = fabs(lv[a])
                if al > lmax:
                    lmax = al
                if al < lmin:
                    lmin = al
            if not lmax > 0.0:
                continue
            rc = lmin / lmax
            if not rc >= rcond_min:
                continue
            acc = 0.0
            for r in range(k):
                dotc = 0.0
                for a in range(k):
                    dotc += q[a * k + r] * v[n_gram + a]
                acc += q[target * k + r] * dotc / lv[r]
            if isfinite(acc):
                out[j] = acc
                valid[j] = 1

    return out_arr, valid_arr.view(np.bool_)
