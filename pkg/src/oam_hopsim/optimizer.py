"""
Optimal number of hopped modes.

The simplified bound ``C(I) = I s + log2 C(n_t, I)`` with per-mode signal term
``s`` extends to the concave ``f(z) = z s + log2 Gamma(n_t+1)
- log2 Gamma(z+1) - log2 Gamma(n_t-z+1)``. At integers its derivative reduces
to harmonic numbers::

    f'(I) = s - (H_I - H_{n_t-I}) / ln 2

which strictly decreases in ``I``. With ``I0`` the last integer where
``f'(I0) >= 0 > f'(I0+1)``, concavity puts the integer maximiser in
``{I0, I0+1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .bounds import build_covariances, c_upper_kl, c_upper_simplified, signal_term
from .channel import ChannelGains, NoiseProfile

_LN2 = math.log(2.0)


def harmonic(n: int) -> float:
    """``H_n = sum_{i=1}^n 1/i`` with ``H_0 = 0``."""
    if n < 0:
        raise ValueError("harmonic number of negative order")
    return math.fsum(1.0 / i for i in range(1, n + 1))


def f_prime(i: int, signal: float, n_t: int) -> float:
    """Derivative of the continuous hop-count objective at integer ``i``.

    Defined for ``0 <= i <= n_t``; the search uses ``1 <= i <= n_t``.
    """
    if not 0 <= i <= n_t:
        raise ValueError(f"i={i} outside [0, {n_t}]")
    return signal - (harmonic(i) - harmonic(n_t - i)) / _LN2


@dataclass(frozen=True)
class HopCountSearchResult:
    """Outcome of the hop-count search.

    ``i0`` is ``None`` when ``f'`` stays non-negative up to ``n_t`` (the
    high-SNR regime); then the optimum is ``n_t``.
    """

    i0: int | None
    i_star: int
    c_star: float
    f_prime: dict[int, float]
    c_up_profile: dict[int, float]
    kl_scores: dict[int, float] = field(default_factory=dict)

    @property
    def profile_argmax(self) -> int:
        best = max(self.c_up_profile.values())
        return max(i for i, c in self.c_up_profile.items() if c == best)


def find_optimal_hops(
    gains: ChannelGains, noise: NoiseProfile, rescore_top: int = 0, n_threads: int = 1
) -> HopCountSearchResult:
    """Exhaustive sign-change search for the SE-maximising hop count.

    ``rescore_top > 0`` additionally evaluates the KL-based bound for that many
    best candidates of the simplified profile (``kl_scores``).
    """
    n_t = gains.n_t
    s = signal_term(gains, noise)
    fp = {i: f_prime(i, s, n_t) for i in range(1, n_t + 1)}
    profile = {i: c_upper_simplified(gains, noise, i) for i in range(1, n_t + 1)}

    i0 = next((i for i in range(1, n_t) if fp[i] >= 0 > fp[i + 1]), None)
    if i0 is None:
        if fp[1] < 0:
            raise ArithmeticError("f' negative at I=1; signal term must be non-negative")
        i_star = n_t
    else:
        # ties (odd n_t at zero power) go to the larger hop count
        i_star = i0 + 1 if profile[i0 + 1] >= profile[i0] else i0
    c_star = profile[i_star]

    best = max(profile.values())
    if not math.isclose(c_star, best, rel_tol=1e-12, abs_tol=1e-12):
        raise ArithmeticError(f"sign-change optimum I={i_star} ({c_star}) disagrees with profile maximum {best}")

    kl_scores = {}
    if rescore_top > 0:
        for i in sorted(profile, key=profile.get, reverse=True)[:rescore_top]:
            kl_scores[i] = c_upper_kl(build_covariances(gains, noise, i), n_threads)
    return HopCountSearchResult(i0, i_star, c_star, fp, profile, kl_scores)
