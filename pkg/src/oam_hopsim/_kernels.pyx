# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pairwise kernels over diagonal Gaussian covariances.

Rows are distributed over OpenMP threads; every row is reduced sequentially
with Kahan compensation, so results do not depend on the thread count.
"""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport exp, log

cnp.import_array()


def kl_row_sums(const double[:, ::1] cov, const double[::1] logdet, const double[:, ::1] inv, int n_threads=1):
    cdef Py_ssize_t K = cov.shape[0]
    cdef Py_ssize_t N = cov.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(K, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k, j, l
    cdef double total, comp, tr, d, term, y, t
    with nogil:
        for k in prange(K, num_threads=n_threads, schedule="static"):
            total = 0.0
            comp = 0.0
            for j in range(K):
                if j == k:
                    term = 1.0
                else:
                    tr = 0.0
                    for l in range(N):
                        tr = tr + cov[k, l] * inv[j, l]
                    d = logdet[j] - logdet[k] + tr - N
                    if d < 0.0:
                        d = 0.0
                    term = exp(-d)
                y = term - comp
                t = total + y
                comp = (t - total) - y
                total = t
            out[k] = total
    return out_arr


def overlap_row_sums(const double[:, ::1] cov, int n_threads=1):
    cdef Py_ssize_t K = cov.shape[0]
    cdef Py_ssize_t N = cov.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(K, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k, j, l
    cdef double total, comp, prod, term, y, t
    with nogil:
        for k in prange(K, num_threads=n_threads, schedule="static"):
            total = 0.0
            comp = 0.0
            for j in range(K):
                prod = 1.0
                for l in range(N):
                    prod = prod * ((cov[k, l] + cov[j, l]) / (2.0 * cov[k, l]))
                term = 1.0 / prod
                y = term - comp
                t = total + y
                comp = (t - total) - y
                total = t
            out[k] = total
    return out_arr


def mixture_logsumexp(const double[:, ::1] q, const double[::1] logdet, const double[:, ::1] inv, int n_threads=1):
    cdef Py_ssize_t S = q.shape[0]
    cdef Py_ssize_t N = q.shape[1]
    cdef Py_ssize_t K = inv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out_arr = np.empty(S, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t s, j, l
    cdef double best, acc, v, quad
    with nogil:
        for s in prange(S, num_threads=n_threads, schedule="static"):
            best = -1e308
            for j in range(K):
                quad = 0.0
                for l in range(N):
                    quad = quad + q[s, l] * inv[j, l]
                v = -logdet[j] - quad
                if v > best:
                    best = v
            acc = 0.0
            for j in range(K):
                quad = 0.0
                for l in range(N):
                    quad = quad + q[s, l] * inv[j, l]
                acc = acc + exp(-logdet[j] - quad - best)
            out[s] = best + log(acc)
    return out_arr
