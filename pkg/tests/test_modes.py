import itertools
import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oam_hopsim.modes import (
    ModeCombination,
    PnGenerator,
    binomial,
    bits_to_combination,
    combination_positions,
    generate_hop_pattern,
    index_bits,
    iter_combinations,
    mode_alphabet,
    rank,
    unrank,
)


def pascal(n, k):
    row = [1]
    for _ in range(n):
        row = [1] + [a + b for a, b in zip(row, row[1:])] + [1]
    return row[k]


def lex_combinations(n_t, i):
    alphabet = mode_alphabet(n_t)
    return [ModeCombination(c, n_t) for c in itertools.combinations(alphabet, i)]


def test_alphabet():
    assert mode_alphabet(8) == (-3, -2, -1, 0, 1, 2, 3, 4)
    assert mode_alphabet(5) == (-1, 0, 1, 2, 3)
    assert all(abs(l) <= n / 2 for n in range(2, 20, 2) for l in mode_alphabet(n))


def test_binomial_values():
    assert binomial(8, 3) == 56
    assert binomial(16, 9) == pascal(16, 9) == 11440
    assert all(binomial(n, 0) == 1 for n in range(65))
    assert binomial(64, 32) == pascal(64, 32)


def test_binomial_errors():
    with pytest.raises(ValueError):
        binomial(3, 4)
    with pytest.raises(OverflowError):
        binomial(65, 2)


def test_first_and_last_rank():
    n_t, i = 8, 3
    first = ModeCombination(mode_alphabet(n_t)[:i], n_t)
    last = ModeCombination(mode_alphabet(n_t)[-i:], n_t)
    assert rank(first) == 0
    assert rank(last) == binomial(n_t, i) - 1


def test_round_trip_all_56():
    combos = lex_combinations(8, 3)
    assert len(combos) == 56
    for r, c in enumerate(combos):
        assert rank(c) == r
        assert unrank(r, 8, 3) == c
    assert list(iter_combinations(8, 3)) == combos


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 16).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))))
def test_bijection_full_space(args):
    n_t, i = args
    k_total = binomial(n_t, i)
    if k_total > 20000:
        rs = range(0, k_total, k_total // 997)
    else:
        rs = range(k_total)
    prev = None
    for r in rs:
        c = unrank(r, n_t, i)
        assert rank(c) == r
        if prev is not None:
            assert prev.modes < c.modes  # lexicographic order preserved
        prev = c


def test_positions_array_matches_unrank():
    pos = combination_positions(6, 3)
    assert pos.shape == (20, 3)
    for r, row in enumerate(pos):
        assert tuple(row) == unrank(r, 6, 3).positions


@pytest.mark.parametrize("n_t,i", [(4, 2), (8, 3), (10, 5), (16, 3)])
def test_each_mode_hopped_equally(n_t, i):
    counts = Counter(m for c in iter_combinations(n_t, i) for m in c.modes)
    assert set(counts) == set(mode_alphabet(n_t))
    assert set(counts.values()) == {math.comb(n_t - 1, i - 1)}


def test_malformed_combinations():
    with pytest.raises(ValueError):
        ModeCombination((0, 0, 1), 8)
    with pytest.raises(ValueError):
        ModeCombination((2, 1), 8)
    with pytest.raises(ValueError):
        ModeCombination((-4, 0), 8)
    with pytest.raises(ValueError):
        unrank(56, 8, 3)


def test_bits_mapping():
    assert index_bits(8, 3) == 5
    assert bits_to_combination("00000", 8, 3) == unrank(0, 8, 3)
    assert bits_to_combination("11111", 8, 3) == lex_combinations(8, 3)[31]
    assert bits_to_combination([1, 1, 1, 1, 1], 8, 3) == unrank(31, 8, 3)
    with pytest.raises(ValueError):
        bits_to_combination("1111", 8, 3)
    with pytest.raises(ValueError):
        bits_to_combination("11a11", 8, 3)


@pytest.mark.parametrize("n_t,i", [(8, 3), (12, 6), (13, 4), (5, 5)])
def test_bits_injective_exhaustive(n_t, i):
    n_bits = index_bits(n_t, i)
    assert 2**n_bits <= binomial(n_t, i) < 2 ** (n_bits + 1)
    seen = {bits_to_combination(format(v, f"0{n_bits}b") if n_bits else "", n_t, i) for v in range(2**n_bits)}
    assert len(seen) == 2**n_bits


def test_pn_generator_recurrence():
    gen = PnGenerator(0)
    x = gen.state
    mask = (1 << 64) - 1
    x ^= x >> 12
    x ^= (x << 25) & mask
    x ^= x >> 27
    assert gen.next_u64() == (x * 0x2545F4914F6CDD1D) & mask


def test_hop_pattern_deterministic_and_bounded():
    a = generate_hop_pattern(42, 500, 8, 3)
    b = generate_hop_pattern(42, 500, 8, 3)
    assert a == b
    assert a != generate_hop_pattern(43, 500, 8, 3)
    assert all(0 <= r < 56 for r in a.hops)
    assert generate_hop_pattern(7, 50, 6, 6).hops == (0,) * 50
    with pytest.raises(ValueError):
        generate_hop_pattern(1, 0, 8, 3)


def test_hop_pattern_csv():
    pat = generate_hop_pattern(3, 4, 8, 3)
    lines = pat.to_csv().strip().split("\n")
    assert lines[0] == "hop_index,rank,mode_1,mode_2,mode_3"
    for idx, line in enumerate(lines[1:]):
        fields = [int(v) for v in line.split(",")]
        assert fields[0] == idx
        assert tuple(fields[2:]) == unrank(fields[1], 8, 3).modes


def test_hop_frequencies_uniform():
    k_total = 56
    n = 1_000_000
    counts = Counter(generate_hop_pattern(2024, n, 8, 3).hops)
    expected = n / k_total
    chi2 = sum((counts.get(r, 0) - expected) ** 2 / expected for r in range(k_total))
    dof = k_total - 1
    assert chi2 <= dof + 3 * math.sqrt(2 * dof)
