"""
Signal chain: mode symbols -> UCA element signals -> channel -> DFT
decomposition -> active-mode selection.

Everything is vectorised over leading axes; the trailing axis holds either the
``n_t`` element samples or the ``n_t`` mode bins in canonical-alphabet order.
By default both transforms use the unitary DFT (``1/sqrt(n)`` scaling), so
noise variance and signal energy are the same in element and mode domains.
Pass ``unitary=False`` to get the literal phase-ramp sum at the transmitter
(unit-amplitude elements) with a ``1/n`` inverse at the receiver.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channel import ChannelGains, NoiseProfile
from .modes import ModeCombination, mode_alphabet


@dataclass(frozen=True)
class ModeSymbols:
    """Symbols ``symbols[i]`` carried on ``combination.modes[i]``."""

    combination: ModeCombination
    symbols: tuple[complex, ...]

    def __post_init__(self):
        symbols = tuple(complex(s) for s in self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if len(symbols) != self.combination.i:
            raise ValueError(f"need {self.combination.i} symbols, got {len(symbols)}")

    def mode_vector(self) -> np.ndarray:
        """Length-``n_t`` vector with zeros on inactive modes."""
        vec = np.zeros(self.combination.n_t, dtype=complex)
        vec[list(self.combination.positions)] = self.symbols
        return vec


@lru_cache(maxsize=64)
def _idft(n: int) -> np.ndarray:
    modes = np.array(mode_alphabet(n))
    elements = np.arange(n)
    mat = np.exp(2j * np.pi * np.outer(elements, modes) / n) / np.sqrt(n)
    mat.setflags(write=False)
    return mat


def idft_matrix(n: int) -> np.ndarray:
    """Unitary IDFT matrix ``F[element, mode]`` over the canonical alphabet."""
    return _idft(n).copy()


def synthesize(sym: ModeSymbols | np.ndarray, n_t: int, unitary: bool = True) -> np.ndarray:
    """Element signals ``x_n = sum_i s_i exp(j 2 pi n l_i / n_t)``.

    ``sym`` is a :class:`ModeSymbols` or an array of mode vectors (trailing
    axis ``n_t``, alphabet order).
    """
    s = sym.mode_vector() if isinstance(sym, ModeSymbols) else np.asarray(sym, dtype=complex)
    if s.shape[-1] != n_t:
        raise ValueError(f"mode vector length {s.shape[-1]} != n_t={n_t}")
    x = s @ _idft(n_t).T
    return x if unitary else x * np.sqrt(n_t)


def decompose(received: np.ndarray, n_r: int, unitary: bool = True) -> np.ndarray:
    """Mode bins ``F^H r`` in alphabet order."""
    r = np.asarray(received, dtype=complex)
    if r.shape[-1] != n_r:
        raise ValueError(f"received length {r.shape[-1]} != n_r={n_r}")
    y = r @ _idft(n_r).conj()
    return y if unitary else y / np.sqrt(n_r)


def channel_matrix(gains: ChannelGains) -> np.ndarray:
    """Element-domain channel ``F diag(h) F^H``."""
    f = _idft(gains.n_t)
    return (f * gains.gains) @ f.conj().T


def apply_channel(
    x: np.ndarray,
    gains: ChannelGains,
    noise: NoiseProfile | None = None,
    rng_seed: int | np.random.Generator | None = None,
    n_r: int | None = None,
) -> np.ndarray:
    """Received element signals ``r = H x + n``.

    Noise is drawn per mode bin, circularly-symmetric complex Gaussian with
    variance ``noise.sigma2``, and mapped to the element domain by ``F``.
    ``noise=None`` gives the deterministic noiseless channel.
    """
    n_t = gains.n_t
    if n_r is not None and n_r != n_t:
        raise ValueError(f"mode-diagonal decomposition requires n_r == n_t, got n_r={n_r}, n_t={n_t}")
    if noise is not None and gains.modes != noise.modes:
        raise ValueError("gains and noise cover different mode alphabets")
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] != n_t:
        raise ValueError(f"element signal length {x.shape[-1]} != n_t={n_t}")
    f = _idft(n_t)
    # F diag(h) F^H x, applied without forming H
    r = ((x @ f.conj()) * gains.gains) @ f.T
    if noise is not None:
        rng = np.random.default_rng(rng_seed)
        scale = np.sqrt(noise.sigma2 / 2)
        w = scale * (rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape))
        r = r + w @ f.T
    return r


def select_modes(decomposed: np.ndarray, c: ModeCombination) -> np.ndarray:
    """Active-mode bins of ``c``, in combination order."""
    y = np.asarray(decomposed)
    if y.shape[-1] != c.n_t:
        raise ValueError(f"decomposed length {y.shape[-1]} does not cover n_t={c.n_t} modes")
    return y[..., list(c.positions)]


def embed(selected: np.ndarray, c: ModeCombination) -> np.ndarray:
    """Zero-pad active-mode values back to the full alphabet."""
    sel = np.asarray(selected)
    out = np.zeros(sel.shape[:-1] + (c.n_t,), dtype=sel.dtype)
    out[..., list(c.positions)] = sel
    return out


def as_mode_map(bins: np.ndarray, n_t: int | None = None) -> dict[int, complex]:
    """Alphabet-ordered bins as ``{mode: value}``."""
    b = np.asarray(bins)
    modes = mode_alphabet(n_t or b.shape[-1])
    return {l: complex(v) for l, v in zip(modes, b)}
