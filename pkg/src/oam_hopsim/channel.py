"""
Line-of-sight UCA channel gains per OAM mode.

For transmit/receive UCAs of radii ``r1``/``r2`` facing each other at axial
distance ``d``, mode ``l`` sees the gain::

    h_l = beta * wavelength * n_t * j**(-l) * exp(-j 2 pi R / wavelength)
          / (4 pi R) * exp(j phi l) * J_l(2 pi r1 r2 / (wavelength R))

with ``R = sqrt(d**2 + r1**2 + r2**2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .modes import mode_alphabet

SPEED_OF_LIGHT = 299_792_458.0

BESSEL_MAX_ORDER = 64
BESSEL_MAX_ARG = 1.0e4
_SERIES_LIMIT = 12.0
_RESCALE = 1.0e250


class BesselDomainError(ValueError):
    pass


def _bessel_series(n: int, x: float) -> float:
    # ascending series: sum_m (-1)^m (x/2)^(n+2m) / (m! (m+n)!)
    half = 0.5 * x
    term = 1.0
    for k in range(1, n + 1):
        term *= half / k
    if term == 0.0:
        return 0.0
    total = term
    q = -half * half
    m = 0
    while True:
        m += 1
        term *= q / (m * (m + n))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total


def _bessel_miller(n: int, x: float) -> float:
    # downward recurrence from well above the turning point, normalised with
    # J0 + 2 (J2 + J4 + ...) = 1
    top = max(n, x)
    start = int(top + 20.0 * (0.5 * top) ** (1.0 / 3.0) + 30.0)
    start += start % 2
    two_over_x = 2.0 / x
    j_next, j_cur = 0.0, 1.0e-300
    norm = 0.0
    result = 0.0
    for k in range(start, 0, -1):
        j_prev = k * two_over_x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        # j_cur now holds the unnormalised J_{k-1}
        if k - 1 == n:
            result = j_cur
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j_cur
        if abs(j_cur) > _RESCALE:
            j_cur /= _RESCALE
            j_next /= _RESCALE
            norm /= _RESCALE
            result /= _RESCALE
    norm += j_cur
    return result / norm


def bessel_j(order: int, x: float) -> float:
    """Bessel function of the first kind ``J_order(x)`` for integer order.

    Valid for ``|order| <= 64`` and ``|x| <= 1e4`` with absolute error below
    1e-10. Uses the ascending series for ``|x| < 12`` and Miller's normalised
    downward recurrence beyond.

    Raises:
        BesselDomainError: if ``order`` or ``x`` falls outside that envelope.
    """
    if int(order) != order:
        raise BesselDomainError(f"order must be an integer, got {order!r}")
    order = int(order)
    x = float(x)
    if abs(order) > BESSEL_MAX_ORDER or not abs(x) <= BESSEL_MAX_ARG:
        raise BesselDomainError(f"J_{order}({x}) outside |order|<={BESSEL_MAX_ORDER}, |x|<={BESSEL_MAX_ARG:g}")
    n = abs(order)
    # J_{-n}(x) = (-1)^n J_n(x) = J_n(-x)
    sign = -1.0 if (order < 0) != (x < 0) and n % 2 else 1.0
    ax = abs(x)
    if ax == 0.0:
        return 1.0 if n == 0 else 0.0
    value = _bessel_series(n, ax) if ax < _SERIES_LIMIT else _bessel_miller(n, ax)
    return sign * value


@dataclass(frozen=True)
class UcaGeometry:
    """Transmit/receive UCA pair in line of sight.

    ``n_r`` defaults to ``n_t``. ``beta`` aggregates antenna constants and
    ``phi`` is the azimuthal offset entering as ``exp(j phi l)``.
    """

    n_t: int
    r1: float
    r2: float
    d: float
    wavelength: float
    n_r: int | None = None
    beta: complex = 1.0
    phi: float = 0.0

    def __post_init__(self):
        if self.n_r is None:
            object.__setattr__(self, "n_r", self.n_t)
        if self.n_t < 2 or self.n_r < 2:
            raise ValueError(f"need n_t >= 2 and n_r >= 2, got {self.n_t}, {self.n_r}")
        for name in ("r1", "r2", "d", "wavelength"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be positive and finite, got {value}")
        object.__setattr__(self, "beta", complex(self.beta))

    @classmethod
    def from_carrier(cls, carrier_hz: float, **kwargs) -> "UcaGeometry":
        return cls(wavelength=SPEED_OF_LIGHT / carrier_hz, **kwargs)

    @property
    def slant_range(self) -> float:
        return math.sqrt(self.d**2 + self.r1**2 + self.r2**2)

    @property
    def bessel_argument(self) -> float:
        return 2 * math.pi * self.r1 * self.r2 / (self.wavelength * self.slant_range)

    @property
    def modes(self) -> tuple[int, ...]:
        return mode_alphabet(self.n_t)


def channel_gain(geom: UcaGeometry, l: int) -> complex:
    """Complex LoS gain of OAM mode ``l``."""
    if l not in geom.modes:
        raise ValueError(f"mode {l} not in alphabet {geom.modes}")
    lam, rng = geom.wavelength, geom.slant_range
    common = geom.beta * lam * geom.n_t * np.exp(-2j * math.pi * rng / lam) / (4 * math.pi * rng)
    return complex(common * (1j) ** (-l) * np.exp(1j * geom.phi * l) * bessel_j(l, geom.bessel_argument))


@dataclass(frozen=True)
class ChannelGains:
    """Per-mode complex gains aligned with ``modes`` (the canonical alphabet)."""

    modes: tuple[int, ...]
    gains: np.ndarray
    geometry: UcaGeometry | None = field(default=None, compare=False)

    def __post_init__(self):
        gains = np.asarray(self.gains, dtype=complex).copy()
        gains.setflags(write=False)
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        if gains.shape != (len(self.modes),):
            raise ValueError("gains must have one entry per mode")

    @property
    def n_t(self) -> int:
        return len(self.modes)

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.gains) ** 2

    def __getitem__(self, l: int) -> complex:
        return complex(self.gains[self.modes.index(l)])

    def as_dict(self) -> dict[int, complex]:
        return {l: complex(h) for l, h in zip(self.modes, self.gains)}

    def normalized(self) -> "ChannelGains":
        """Rescale so the mean per-mode power ``mean |h_l|**2`` is one."""
        scale = math.sqrt(float(np.mean(self.power)))
        if scale == 0.0:
            raise ValueError("cannot normalise an all-zero channel")
        return ChannelGains(self.modes, self.gains / scale, self.geometry)


def channel_gains(geom: UcaGeometry, normalize: bool = False) -> ChannelGains:
    gains = ChannelGains(geom.modes, np.array([channel_gain(geom, l) for l in geom.modes]), geom)
    return gains.normalized() if normalize else gains


def flat_gains(n_t: int) -> ChannelGains:
    """Unit gain on every mode."""
    return ChannelGains(mode_alphabet(n_t), np.ones(n_t, dtype=complex))


@dataclass(frozen=True)
class NoiseProfile:
    """Per-mode noise variances (W) and the per-active-mode transmit power ``p0`` (W)."""

    modes: tuple[int, ...]
    sigma2: np.ndarray
    p0: float = 1.0

    def __post_init__(self):
        sigma2 = np.asarray(self.sigma2, dtype=float).copy()
        sigma2.setflags(write=False)
        object.__setattr__(self, "sigma2", sigma2)
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        if sigma2.shape != (len(self.modes),):
            raise ValueError("sigma2 must have one entry per mode")
        if not np.all(sigma2 > 0) or not np.all(np.isfinite(sigma2)):
            raise ValueError("noise variances must be positive and finite")
        if not self.p0 >= 0:
            raise ValueError(f"p0 must be non-negative, got {self.p0}")

    @classmethod
    def common(cls, n_t: int, sigma2: float, p0: float = 1.0) -> "NoiseProfile":
        return cls(mode_alphabet(n_t), np.full(n_t, float(sigma2)), p0)

    @classmethod
    def from_snr_db(cls, n_t: int, snr_db: float, p0: float = 1.0) -> "NoiseProfile":
        """Common noise with ``p0 / sigma2`` equal to the given channel SNR.

        A zero ``p0`` keeps unit noise so the profile stays valid.
        """
        if not math.isfinite(snr_db):
            raise ValueError("snr_db must be finite")
        sigma2 = p0 / 10 ** (snr_db / 10) if p0 > 0 else 1.0
        return cls.common(n_t, sigma2, p0)

    def with_power(self, p0: float) -> "NoiseProfile":
        return NoiseProfile(self.modes, self.sigma2, p0)


def mode_snrs(gains: ChannelGains, noise: NoiseProfile) -> np.ndarray:
    """Per-mode SNR ``|h_l|**2 / sigma_l**2``, aligned with ``gains.modes``."""
    if gains.modes != noise.modes:
        raise ValueError(f"mode alphabets differ: {gains.modes} vs {noise.modes}")
    return gains.power / noise.sigma2
