import math
from fractions import Fraction

import numpy as np
import pytest

from oam_hopsim.bounds import signal_term
from oam_hopsim.channel import ChannelGains, NoiseProfile, flat_gains
from oam_hopsim.modes import mode_alphabet
from oam_hopsim.optimizer import f_prime, find_optimal_hops, harmonic


def brute_force_argmax(gains, noise):
    """Oracle: evaluate i*s + log2 C(n_t, i) directly, largest maximiser wins."""
    n_t = gains.n_t
    gamma = np.abs(gains.gains) ** 2 / noise.sigma2
    s = sum(math.log2(1 + noise.p0 * g) for g in gamma) / n_t
    vals = {i: i * s + math.log2(math.comb(n_t, i)) for i in range(1, n_t + 1)}
    best = max(vals.values())
    return max(i for i, v in vals.items() if math.isclose(v, best, rel_tol=1e-12, abs_tol=1e-12)), best


def random_channel(rng, n_t):
    gains = ChannelGains(mode_alphabet(n_t), rng.standard_normal(n_t) + 1j * rng.standard_normal(n_t))
    noise = NoiseProfile(mode_alphabet(n_t), rng.uniform(0.1, 3.0, n_t), float(10 ** rng.uniform(-3, 2)))
    return gains, noise


def test_harmonic_numbers():
    assert harmonic(0) == 0.0
    assert harmonic(1) == 1.0
    assert harmonic(8) == pytest.approx(float(Fraction(761, 280)), abs=1e-15)
    assert harmonic(8) == pytest.approx(2.717857142857143, abs=1e-15)
    with pytest.raises(ValueError):
        harmonic(-1)


def test_f_prime_values():
    assert f_prime(8, 0.0, 16) == 0.0
    assert f_prime(8, 1.7, 16) == 1.7
    expected = -(float(Fraction(7381, 2520)) - float(Fraction(49, 20))) / math.log(2)
    assert f_prime(10, 0.0, 16) == pytest.approx(expected, abs=1e-12)
    assert f_prime(10, 0.0, 16) == pytest.approx(-0.6910051247432456, abs=1e-12)
    with pytest.raises(ValueError):
        f_prime(17, 0.0, 16)


@pytest.mark.parametrize("n_t", [2, 5, 8, 16, 31])
def test_f_prime_positive_below_half_and_decreasing(n_t):
    for s in (0.0, 0.3, 2.0):
        vals = [f_prime(i, s, n_t) for i in range(0, n_t + 1)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert all(f_prime(i, s, n_t) > 0 for i in range(1, n_t) if 2 * i < n_t)


def test_zero_power_optimum_is_half():
    res = find_optimal_hops(flat_gains(16), NoiseProfile.common(16, 1.0, p0=0.0))
    assert res.i0 == 8 and res.i_star == 8
    assert res.c_star == pytest.approx(math.log2(12870), abs=1e-9)
    assert res.c_star == pytest.approx(13.65172443310806, abs=1e-12)


@pytest.mark.parametrize("n_t", [5, 9, 15])
def test_zero_power_odd_tie_goes_up(n_t):
    res = find_optimal_hops(flat_gains(n_t), NoiseProfile.common(n_t, 1.0, p0=0.0))
    assert res.i_star == (n_t + 1) // 2
    assert res.c_star == pytest.approx(math.log2(math.comb(n_t, n_t // 2)), abs=1e-12)


def test_high_power_uses_every_mode():
    noise = NoiseProfile.common(16, 1.0, p0=1e4)
    res = find_optimal_hops(flat_gains(16), noise)
    assert signal_term(flat_gains(16), noise) > harmonic(16) / math.log(2)
    assert res.i0 is None and res.i_star == 16


def test_last_step_rule():
    # C(n_t) - C(n_t - 1) = s - log2 n_t, so s just above log2 16 = 4 picks n_t,
    # s just below picks n_t - 1 even when s exceeds (H_15 - H_1) / ln 2.
    for p0, expected in [(2**4.05 - 1, 16), (2**3.95 - 1, 15)]:
        res = find_optimal_hops(flat_gains(16), NoiseProfile.common(16, 1.0, p0=p0))
        assert res.i_star == expected


def test_matches_brute_force_random():
    rng = np.random.default_rng(2025)
    for _ in range(100):
        n_t = int(rng.integers(2, 25))
        gains, noise = random_channel(rng, n_t)
        res = find_optimal_hops(gains, noise)
        i_bf, best = brute_force_argmax(gains, noise)
        assert res.i_star == i_bf
        assert res.c_star == pytest.approx(best, abs=1e-12)
        assert res.i_star == res.profile_argmax
        if res.i0 is not None:
            assert res.i_star in (res.i0, res.i0 + 1)
            assert res.f_prime[res.i0] >= 0 > res.f_prime[res.i0 + 1]


def test_rescore_top(gains4, noise4):
    res = find_optimal_hops(gains4, noise4, rescore_top=2)
    assert len(res.kl_scores) == 2
    top2 = sorted(res.c_up_profile, key=res.c_up_profile.get, reverse=True)[:2]
    assert set(res.kl_scores) == set(top2)
    for i, v in res.kl_scores.items():
        assert v <= res.c_up_profile[i] + 1e-9
