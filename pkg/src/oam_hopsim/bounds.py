"""
Spectrum-efficiency bounds for OAM mode hopping with index bits.

Each of the ``K = C(n_t, i)`` mode combinations induces a zero-mean circular
complex Gaussian on the decomposed mode bins. Its covariance is diagonal with
``p0 |h_l|**2 + sigma_l**2`` on active modes and ``sigma_l**2`` on inactive
ones. The receiver does not know the combination, so all bounds are evaluated
on the full ``n_t``-bin observation; this is what makes KL divergences and
covariance sums between combinations with different active sets well defined.

KL divergences are computed in nats and exponentiated in nats; reported
quantities are in bits (bits/s/Hz).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .channel import ChannelGains, NoiseProfile, mode_snrs
from .modes import binomial, combination_positions

LOG2E = 1.0 / math.log(2.0)


@dataclass(frozen=True)
class CovarianceSet:
    """Received-signal covariance diagonals for every mode combination.

    Attributes:
        positions: ``(K, i)`` alphabet positions of each combination's active modes.
        full: ``(K, n_t)`` received covariance diagonals over all mode bins.
        noise: ``(n_t,)`` noise variances per mode bin.
    """

    positions: np.ndarray
    full: np.ndarray
    noise: np.ndarray

    def __post_init__(self):
        positions = np.atleast_2d(np.asarray(self.positions, dtype=np.intp))
        full = np.atleast_2d(np.asarray(self.full, dtype=float))
        noise = np.asarray(self.noise, dtype=float)
        for arr in (positions, full, noise):
            arr.setflags(write=False)
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "full", full)
        object.__setattr__(self, "noise", noise)
        if full.shape[0] != positions.shape[0] or full.shape[1] != noise.shape[0]:
            raise ValueError(f"inconsistent shapes {positions.shape}, {full.shape}, {noise.shape}")
        if not (np.all(full > 0) and np.all(noise > 0)):
            raise ValueError("covariance diagonals must be positive")
        if not (np.all(np.isfinite(full)) and np.all(np.isfinite(noise))):
            raise ValueError("covariance diagonals must be finite")

    @property
    def k_total(self) -> int:
        return self.full.shape[0]

    @property
    def n_t(self) -> int:
        return self.full.shape[1]

    @property
    def i(self) -> int:
        return self.positions.shape[1]

    @property
    def active(self) -> np.ndarray:
        """``(K, i)`` received variances on active modes, in combination order."""
        return np.take_along_axis(self.full, self.positions, axis=1)

    @property
    def noise_active(self) -> np.ndarray:
        return self.noise[self.positions]


@dataclass(frozen=True)
class SeBounds:
    c_low: float
    c_up_kl: float
    c_up_simplified: float


@dataclass(frozen=True)
class MutualInfoEstimate:
    """Monte Carlo mutual information in bits/s/Hz.

    ``estimate`` is the total (signal plus index) information; only the index
    part is random, so ``std_err`` is its standard error.
    """

    estimate: float
    std_err: float
    index_info: float
    signal_info: float
    entropy: float
    n_samples: int


def build_covariances(gains: ChannelGains, noise: NoiseProfile, i: int) -> CovarianceSet:
    if gains.modes != noise.modes:
        raise ValueError("gains and noise cover different mode alphabets")
    n_t = gains.n_t
    if not 1 <= i <= n_t:
        raise ValueError(f"hop count i={i} must be in [1, {n_t}]")
    positions = combination_positions(n_t, i)
    sigma2 = np.asarray(noise.sigma2, dtype=float)
    received = noise.p0 * gains.power + sigma2
    full = np.tile(sigma2, (positions.shape[0], 1))
    np.put_along_axis(full, positions, received[positions], axis=1)
    return CovarianceSet(positions, full, sigma2)


def signal_information(cov: CovarianceSet) -> float:
    """Mean over combinations of ``sum_i log2(1 + p0 gamma_i)``."""
    per_k = np.log2(cov.active / cov.noise_active).sum(axis=1)
    return math.fsum(per_k) / cov.k_total


def _kl_nats(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # KL(CN(0, diag a) || CN(0, diag b)) summed over the trailing axis
    r = a / b
    return (r - 1.0 - np.log(r)).sum(axis=-1)


def gaussian_kl(k: int, j: int, cov: CovarianceSet) -> float:
    """``D[f(y_k) || f(y_j)]`` in bits."""
    return float(_kl_nats(cov.full[k], cov.full[j])) * LOG2E


def kl_mixture_upper(k: int, cov: CovarianceSet) -> float:
    """Upper bound on ``D[f(y_k) || f(y)]`` in bits, ``f`` the equiprobable mixture.

    ``-log2(mean_j exp(-D_nats(k, j)))``; lies in ``[0, log2 K]``.
    """
    d = _kl_nats(cov.full[k][None, :], cov.full)
    d[k] = 0.0
    return -math.log2(math.fsum(np.exp(-np.maximum(d, 0.0))) / cov.k_total)


def index_information_upper(cov: CovarianceSet, n_threads: int = 1, backend: str | None = None) -> float:
    """Average of :func:`kl_mixture_upper` over all combinations."""
    row_sums = kernels.kl_row_sums(cov.full, n_threads, backend)
    return math.log2(cov.k_total) - math.fsum(np.log2(row_sums)) / cov.k_total


def c_lower(cov: CovarianceSet, n_threads: int = 1, backend: str | None = None) -> float:
    """Jensen lower bound on the achievable SE (bits/s/Hz).

    ``log2 K - sum_l log2 sigma_l**2 - n log2(pi e)
    - (1/K) sum_k log2 sum_j 1 / (pi**n |S_k + S_j|)`` with ``n = n_t``.
    Pair sums are accumulated relative to ``|2 S_k|`` so nothing under- or
    overflows.
    """
    n = cov.n_t
    k_total = cov.k_total
    overlap = kernels.overlap_row_sums(cov.full, n_threads, backend)
    logdet2 = np.log2(cov.full).sum(axis=1)
    # log2 sum_j 1/|S_k + S_j| = log2 overlap_k - n - log2|S_k|
    mean_log_pairs = (math.fsum(np.log2(overlap)) - math.fsum(logdet2)) / k_total - n
    noise_term = math.fsum(np.log2(cov.noise))
    return math.log2(k_total) - noise_term - n * math.log2(math.e) - mean_log_pairs


def c_upper_kl(cov: CovarianceSet, n_threads: int = 1, backend: str | None = None) -> float:
    """Signal information plus the KL-based index-information bound."""
    return signal_information(cov) + index_information_upper(cov, n_threads, backend)


def signal_term(gains: ChannelGains, noise: NoiseProfile) -> float:
    """Per-mode average ``(1/n_t) sum_l log2(1 + p0 gamma_l)``."""
    gamma = mode_snrs(gains, noise)
    return math.fsum(np.log2(1.0 + noise.p0 * gamma)) / gains.n_t


def c_upper_simplified(gains: ChannelGains, noise: NoiseProfile, i: int) -> float:
    """``i * signal_term + log2 C(n_t, i)``."""
    n_t = gains.n_t
    if not 1 <= i <= n_t:
        raise ValueError(f"hop count i={i} must be in [1, {n_t}]")
    return i * signal_term(gains, noise) + math.log2(binomial(n_t, i))


def se_bounds(
    gains: ChannelGains, noise: NoiseProfile, i: int, n_threads: int = 1, backend: str | None = None
) -> SeBounds:
    cov = build_covariances(gains, noise, i)
    return SeBounds(
        c_low=c_lower(cov, n_threads, backend),
        c_up_kl=c_upper_kl(cov, n_threads, backend),
        c_up_simplified=c_upper_simplified(gains, noise, i),
    )


def monte_carlo_mutual_info(
    cov: CovarianceSet,
    n_samples: int,
    seed: int | Sequence[int] = 0,
    n_threads: int = 1,
    backend: str | None = None,
    shard_size: int = 1 << 16,
) -> MutualInfoEstimate:
    """Monte Carlo estimate of the mutual information between input and bins.

    Draws a combination ``k`` uniformly and ``y ~ CN(0, S_k)``, then averages
    ``log f_k(y) - log f(y)`` with ``f`` the equiprobable Gaussian mixture.
    Adding the exact per-combination entropy ``E[-log f_k(y)]`` gives the
    mixture entropy ``H(y)``; subtracting the noise entropy gives the mutual
    information. Only ``|y_l|**2`` enters the densities, and for circular
    Gaussians ``|y_l|**2 = S_kl * E_l`` with ``E_l ~ Exp(1)``.

    Samples are drawn in shards from ``SeedSequence(seed).spawn`` substreams,
    so the result depends only on ``seed``, ``n_samples`` and ``shard_size``.
    """
    if n_samples < 10_000:
        raise ValueError(f"n_samples must be at least 1e4, got {n_samples}")
    full = cov.full
    k_total, n = full.shape
    logdet = np.log(full).sum(axis=1)
    n_shards = -(-n_samples // shard_size)
    streams = np.random.SeedSequence(seed).spawn(n_shards)
    parts = []
    for s, stream in enumerate(streams):
        m = min(shard_size, n_samples - s * shard_size)
        rng = np.random.default_rng(stream)
        k = rng.integers(k_total, size=m)
        e = rng.standard_exponential((m, n))
        q = full[k] * e
        own = -logdet[k] - e.sum(axis=1)
        mix = kernels.mixture_logsumexp(q, full, n_threads, backend) - math.log(k_total)
        parts.append(own - mix)
    v = np.concatenate(parts) * LOG2E
    index_info = float(np.mean(v))
    std_err = float(np.std(v, ddof=1) / math.sqrt(n_samples))
    sig = signal_information(cov)
    cond_entropy = math.fsum(np.log2(math.pi * math.e * cov.noise))
    entropy = cond_entropy + sig + index_info
    return MutualInfoEstimate(
        estimate=sig + index_info,
        std_err=std_err,
        index_info=index_info,
        signal_info=sig,
        entropy=entropy,
        n_samples=n_samples,
    )
