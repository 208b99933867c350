"""Backend selection for the pairwise covariance kernels.

The compiled Cython extension is used when importable; otherwise, or when the
environment variable ``OAM_HOPSIM_PURE=1`` is set, the NumPy fallback is used.

Kernels (all covariances are ``(K, N)`` arrays of diagonal entries):

``kl_row_sums(cov, logdet, inv, n_threads)``
    ``sum_j exp(-D(k||j))`` per row ``k``, with ``D`` the Gaussian KL
    divergence in nats (clamped at zero; the ``j == k`` term is exactly 1).
``overlap_row_sums(cov, n_threads)``
    ``sum_j |2 S_k| / |S_k + S_j|`` per row ``k``.
``mixture_logsumexp(q, logdet, inv, n_threads)``
    ``logsumexp_j(-logdet_j - sum_l q_l / S_jl)`` per sample row of ``q``.
"""

from __future__ import annotations

import os

import numpy as np

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover - exercised when the extension is absent
    _compiled = None

BACKENDS = {"python": _fallback}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

if _compiled is not None and os.environ.get("OAM_HOPSIM_PURE", "") not in ("1", "true", "yes"):
    DEFAULT_BACKEND = "compiled"
else:
    DEFAULT_BACKEND = "python"


def get_backend(name: str | None = None):
    name = name or DEFAULT_BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable kernel backend {name!r}; have {sorted(BACKENDS)}") from None


def _prep(cov):
    cov = np.ascontiguousarray(cov, dtype=np.float64)
    logdet = np.ascontiguousarray(np.log(cov).sum(axis=1))
    inv = np.ascontiguousarray(1.0 / cov)
    return cov, logdet, inv


def kl_row_sums(cov, n_threads: int = 1, backend: str | None = None) -> np.ndarray:
    cov, logdet, inv = _prep(cov)
    return np.asarray(get_backend(backend).kl_row_sums(cov, logdet, inv, int(n_threads)))


def overlap_row_sums(cov, n_threads: int = 1, backend: str | None = None) -> np.ndarray:
    cov = np.ascontiguousarray(cov, dtype=np.float64)
    return np.asarray(get_backend(backend).overlap_row_sums(cov, int(n_threads)))


def mixture_logsumexp(q, cov, n_threads: int = 1, backend: str | None = None) -> np.ndarray:
    _, logdet, inv = _prep(cov)
    q = np.ascontiguousarray(q, dtype=np.float64)
    return np.asarray(get_backend(backend).mixture_logsumexp(q, logdet, inv, int(n_threads)))
