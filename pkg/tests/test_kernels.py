import math
import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.special import logsumexp

from oam_hopsim import kernels

BACKENDS = sorted(kernels.BACKENDS)
needs_compiled = pytest.mark.skipif("compiled" not in kernels.BACKENDS, reason="extension not built")


def random_cov(seed, k=37, n=6):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.1, 5.0, (k, n))


def oracle_kl_rows(cov):
    out = []
    for a in cov:
        total = 0.0
        for b in cov:
            d = sum(math.log(bl / al) + al / bl - 1 for al, bl in zip(a, b))
            total += math.exp(-max(d, 0.0))
        out.append(total)
    return np.array(out)


def oracle_overlap_rows(cov):
    return np.array([sum(np.prod(2 * a / (a + b)) for b in cov) for a in cov])


@pytest.mark.parametrize("backend", BACKENDS)
def test_kl_rows_against_loop(backend):
    cov = random_cov(1)
    np.testing.assert_allclose(kernels.kl_row_sums(cov, backend=backend), oracle_kl_rows(cov), rtol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_overlap_rows_against_loop(backend):
    cov = random_cov(2)
    np.testing.assert_allclose(kernels.overlap_row_sums(cov, backend=backend), oracle_overlap_rows(cov), rtol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_mixture_logsumexp_against_scipy(backend):
    cov = random_cov(3)
    rng = np.random.default_rng(4)
    q = rng.exponential(2.0, (50, cov.shape[1]))
    expected = logsumexp(-np.log(cov).sum(1)[None, :] - q @ (1 / cov).T, axis=1)
    np.testing.assert_allclose(kernels.mixture_logsumexp(q, cov, backend=backend), expected, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("backend", BACKENDS)
def test_diagonal_term_is_one(backend):
    cov = np.tile(random_cov(5, k=1), (4, 1))
    np.testing.assert_array_equal(kernels.kl_row_sums(cov, backend=backend), np.full(4, 4.0))
    np.testing.assert_array_equal(kernels.overlap_row_sums(cov, backend=backend), np.full(4, 4.0))


@needs_compiled
def test_backends_agree():
    cov = random_cov(6, k=300, n=16)
    a = kernels.kl_row_sums(cov, backend="compiled")
    b = kernels.kl_row_sums(cov, backend="python")
    np.testing.assert_allclose(a, b, rtol=1e-12)
    np.testing.assert_allclose(
        kernels.overlap_row_sums(cov, backend="compiled"), kernels.overlap_row_sums(cov, backend="python"), rtol=1e-12
    )


@pytest.mark.parametrize("backend", BACKENDS)
def test_thread_count_bit_identical(backend):
    cov = random_cov(7, k=500, n=9)
    q = np.random.default_rng(8).exponential(1.0, (400, 9))
    ref = [
        kernels.kl_row_sums(cov, 1, backend),
        kernels.overlap_row_sums(cov, 1, backend),
        kernels.mixture_logsumexp(q, cov, 1, backend),
    ]
    for threads in (2, 4):
        got = [
            kernels.kl_row_sums(cov, threads, backend),
            kernels.overlap_row_sums(cov, threads, backend),
            kernels.mixture_logsumexp(q, cov, threads, backend),
        ]
        for r, g in zip(ref, got):
            np.testing.assert_array_equal(r, g)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


def test_pure_python_env_selection():
    code = "from oam_hopsim import kernels; print(kernels.DEFAULT_BACKEND)"
    env = dict(os.environ, OAM_HOPSIM_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
