"""Pure NumPy versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and semantics. Rows are processed in blocks; a thread pool
spreads blocks over ``n_threads`` workers (NumPy releases the GIL). Each row's
reduction only sees that row's data, in a fixed order, so results do not
depend on ``n_threads`` or the block size.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

_BLOCK_ELEMENTS = 1 << 21


def _blocks(n_rows: int, row_len: int):
    step = max(1, _BLOCK_ELEMENTS // max(row_len, 1))
    return [(lo, min(lo + step, n_rows)) for lo in range(0, n_rows, step)]


def _run(blocks, fn, n_threads):
    if n_threads <= 1 or len(blocks) == 1:
        for b in blocks:
            fn(*b)
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(lambda b: fn(*b), blocks))


def kl_row_sums(cov, logdet, inv, n_threads=1):
    K, N = cov.shape
    out = np.empty(K)

    def block(lo, hi):
        tr = np.zeros((hi - lo, K))
        for l in range(N):
            tr += cov[lo:hi, l, None] * inv[None, :, l]
        d = logdet[None, :] - logdet[lo:hi, None] + tr - N
        np.maximum(d, 0.0, out=d)
        terms = np.exp(-d)
        rows = np.arange(lo, hi)
        terms[rows - lo, rows] = 1.0
        out[lo:hi] = terms.sum(axis=1)

    _run(_blocks(K, K), block, n_threads)
    return out


def overlap_row_sums(cov, n_threads=1):
    K, N = cov.shape
    out = np.empty(K)

    def block(lo, hi):
        prod = np.ones((hi - lo, K))
        for l in range(N):
            a = cov[lo:hi, l, None]
            prod *= (a + cov[None, :, l]) / (2.0 * a)
        out[lo:hi] = (1.0 / prod).sum(axis=1)

    _run(_blocks(K, K), block, n_threads)
    return out


def mixture_logsumexp(q, logdet, inv, n_threads=1):
    S, N = q.shape
    K = inv.shape[0]
    out = np.empty(S)

    def block(lo, hi):
        quad = np.zeros((hi - lo, K))
        for l in range(N):
            quad += q[lo:hi, l, None] * inv[None, :, l]
        v = -logdet[None, :] - quad
        best = v.max(axis=1)
        out[lo:hi] = best + np.log(np.exp(v - best[:, None]).sum(axis=1))

    _run(_blocks(S, K), block, n_threads)
    return out
