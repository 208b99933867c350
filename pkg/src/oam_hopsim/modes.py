"""
Index-modulation combinatorics for OAM mode hopping.

Modes are drawn from the canonical UCA alphabet
``{-floor(n_t/2)+1, ..., ceil(n_t/2)}``. A transmission activates ``i`` of the
``n_t`` modes; the ``K = C(n_t, i)`` possible sets are ordered
lexicographically and addressed by their rank (combinadic numbering).
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

MAX_N = 64
_MASK64 = (1 << 64) - 1


def mode_alphabet(n_t: int) -> tuple[int, ...]:
    """Canonical OAM mode orders for an ``n_t``-element UCA, ascending."""
    if n_t < 1:
        raise ValueError(f"n_t must be positive, got {n_t}")
    lo = -(n_t // 2) + 1
    return tuple(range(lo, lo + n_t))


def mode_position(l: int, n_t: int) -> int:
    """Position of mode ``l`` inside ``mode_alphabet(n_t)``."""
    pos = l + n_t // 2 - 1
    if not 0 <= pos < n_t:
        raise ValueError(f"mode {l} is outside the alphabet for n_t={n_t}")
    return pos


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k) for ``0 <= k <= n <= 64``.

    Every such value fits a signed 64-bit integer (C(64, 32) < 2**63), which is
    the representable range the rest of the package relies on.
    """
    if n < 0 or k < 0:
        raise ValueError("binomial arguments must be non-negative")
    if k > n:
        raise ValueError(f"k={k} exceeds n={n}")
    if n > MAX_N:
        raise OverflowError(f"n={n} exceeds supported maximum {MAX_N}")
    return math.comb(n, k)


@dataclass(frozen=True)
class ModeCombination:
    """A strictly ascending set of active OAM modes for an ``n_t``-mode UCA."""

    modes: tuple[int, ...]
    n_t: int

    def __post_init__(self):
        modes = tuple(int(m) for m in self.modes)
        object.__setattr__(self, "modes", modes)
        if not 1 <= len(modes) <= self.n_t:
            raise ValueError(f"need 1..{self.n_t} modes, got {len(modes)}")
        if any(b <= a for a, b in zip(modes, modes[1:])):
            raise ValueError(f"modes must be strictly ascending: {modes}")
        alphabet = mode_alphabet(self.n_t)
        if modes[0] < alphabet[0] or modes[-1] > alphabet[-1]:
            raise ValueError(f"modes {modes} outside alphabet {alphabet}")

    @property
    def i(self) -> int:
        return len(self.modes)

    @property
    def positions(self) -> tuple[int, ...]:
        offset = self.n_t // 2 - 1
        return tuple(m + offset for m in self.modes)

    @classmethod
    def from_positions(cls, positions: Sequence[int], n_t: int) -> "ModeCombination":
        offset = n_t // 2 - 1
        return cls(tuple(int(p) - offset for p in positions), n_t)


def rank(c: ModeCombination) -> int:
    """Lexicographic rank of ``c`` among all C(n_t, i) combinations."""
    n, i = c.n_t, c.i
    r = 0
    prev = -1
    for slot, p in enumerate(c.positions):
        remaining = i - slot - 1
        # combinations that place this slot at a smaller position
        for q in range(prev + 1, p):
            r += math.comb(n - q - 1, remaining)
        prev = p
    return r


def unrank(r: int, n_t: int, i: int) -> ModeCombination:
    """Inverse of :func:`rank`."""
    k_total = binomial(n_t, i)
    if not 0 <= r < k_total:
        raise ValueError(f"rank {r} out of range [0, {k_total})")
    if i < 1:
        raise ValueError("i must be at least 1")
    positions = []
    q = 0
    for slot in range(i):
        remaining = i - slot - 1
        while True:
            block = math.comb(n_t - q - 1, remaining)
            if r < block:
                break
            r -= block
            q += 1
        positions.append(q)
        q += 1
    return ModeCombination.from_positions(positions, n_t)


def iter_combinations(n_t: int, i: int) -> Iterator[ModeCombination]:
    """All combinations in rank order."""
    for pos in itertools.combinations(range(n_t), i):
        yield ModeCombination.from_positions(pos, n_t)


def combination_positions(n_t: int, i: int) -> np.ndarray:
    """``(K, i)`` array of alphabet positions, row ``k`` being the rank-``k`` combination."""
    binomial(n_t, i)
    if i == 0:
        return np.zeros((1, 0), dtype=np.intp)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n_t), i)),
        dtype=np.intp,
    )
    return flat.reshape(-1, i)


def index_bits(n_t: int, i: int) -> int:
    """Number of index bits carried per hop, ``floor(log2 K)``."""
    return binomial(n_t, i).bit_length() - 1


def bits_to_combination(bits: str | Sequence[int], n_t: int, i: int) -> ModeCombination:
    """Map ``floor(log2 K)`` index bits (MSB first) to a mode combination.

    Only the first ``2**floor(log2 K)`` combinations are addressable.
    """
    if isinstance(bits, str):
        if set(bits) - {"0", "1"}:
            raise ValueError(f"not a bit string: {bits!r}")
        values = [int(b) for b in bits]
    else:
        values = [int(b) for b in bits]
        if any(b not in (0, 1) for b in values):
            raise ValueError(f"bits must be 0/1: {bits!r}")
    n_bits = index_bits(n_t, i)
    if len(values) != n_bits:
        raise ValueError(f"expected {n_bits} bits for (n_t={n_t}, i={i}), got {len(values)}")
    r = 0
    for b in values:
        r = (r << 1) | b
    return unrank(r, n_t, i)


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class PnGenerator:
    """Pseudo-noise source driving the index selector (xorshift64*).

    State update, all arithmetic modulo 2**64::

        x ^= x >> 12
        x ^= x << 25
        x ^= x >> 27
        out = x * 0x2545F4914F6CDD1D

    The initial state is ``splitmix64(seed)``, replaced by 1 if it is zero.
    """

    def __init__(self, seed: int):
        self.state = _splitmix64(int(seed) & _MASK64) or 1

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection (no modulo bias)."""
        if bound < 1:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        threshold = (1 << 64) % bound
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % bound


@dataclass(frozen=True)
class HopPattern:
    seed: int
    hops: tuple[int, ...]
    n_t: int
    i: int

    def combinations(self) -> list[ModeCombination]:
        return [unrank(r, self.n_t, self.i) for r in self.hops]

    def csv_rows(self) -> list[list]:
        header = ["hop_index", "rank"] + [f"mode_{m + 1}" for m in range(self.i)]
        rows = [header]
        for idx, r in enumerate(self.hops):
            rows.append([idx, r, *unrank(r, self.n_t, self.i).modes])
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(self.csv_rows())
        return buf.getvalue()


def generate_hop_pattern(seed: int, n_hops: int, n_t: int, i: int) -> HopPattern:
    """Draw ``n_hops`` combination ranks uniformly over ``[0, C(n_t, i))``."""
    if n_hops < 1:
        raise ValueError("n_hops must be at least 1")
    k_total = binomial(n_t, i)
    gen = PnGenerator(seed)
    hops = tuple(gen.below(k_total) for _ in range(n_hops))
    return HopPattern(seed=int(seed), hops=hops, n_t=n_t, i=i)
