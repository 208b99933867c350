"""
Experiment drivers behind the ``oam-hopsim`` subcommands.

Each ``cmd_*`` returns a header plus rows; :func:`write_csv` renders them.
Sweep points run concurrently on ``config.threads`` workers and come back in
input order.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bounds import build_covariances, c_lower, c_upper_kl, c_upper_simplified, monte_carlo_mutual_info
from .channel import mode_snrs
from .config import ExperimentConfig
from .modes import binomial, generate_hop_pattern
from .optimizer import HopCountSearchResult, find_optimal_hops

KL_GUARD = 20_000


class GuardRefusal(RuntimeError):
    pass


class NumericalFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class Crossover:
    n_t: int
    snr_db: float
    best_i_below: int


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".12g")
    return str(v)


def write_csv(header: list[str], rows: list[list], stream=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def _pmap(fn, items, threads):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _check_guard(n_t: int, i: int, force: bool):
    k_total = binomial(n_t, i)
    if k_total > KL_GUARD and not force:
        raise GuardRefusal(
            f"K = C({n_t},{i}) = {k_total} > {KL_GUARD}: KL-based bounds need K^2 pair terms; "
            "pass --force, or set kl_bounds = false to use the simplified bound only"
        )


def _finite(*values):
    if not all(math.isfinite(v) for v in values):
        raise NumericalFailure(f"non-finite result: {values}")


def _grid(cfg: ExperimentConfig):
    return [
        (snr, n_t, i)
        for snr, n_t, i in itertools.product(cfg.snr_db, cfg.n_t_values, cfg.i_values)
        if i <= n_t
    ]


def cmd_channel_gains(cfg: ExperimentConfig, raw: bool = False):
    """Per-mode gains; ``gamma`` uses the first configured SNR."""
    gains = cfg.gains(raw=raw)
    gamma = mode_snrs(gains, cfg.noise(cfg.n_t, cfg.snr_db[0]))
    rows = [[l, h.real, h.imag, abs(h), g] for l, h, g in zip(gains.modes, gains.gains, gamma)]
    return ["l", "re_h", "im_h", "abs_h", "gamma"], rows


def cmd_sweep_snr(cfg: ExperimentConfig, force: bool = False, raw: bool = False):
    grid = _grid(cfg)
    if cfg.kl_bounds:
        for _, n_t, i in grid:
            _check_guard(n_t, i, force)

    def point(p):
        snr, n_t, i = p
        gains, noise = cfg.gains(n_t, raw), cfg.noise(n_t, snr)
        c_up_s = c_upper_simplified(gains, noise, i)
        if cfg.kl_bounds:
            cov = build_covariances(gains, noise, i)
            c_lo, c_kl = c_lower(cov), c_upper_kl(cov)
        else:
            c_lo = c_kl = math.nan
        _finite(c_up_s, *([c_lo, c_kl] if cfg.kl_bounds else []))
        return [snr, n_t, i, c_lo, c_kl, c_up_s]

    rows = _pmap(point, grid, cfg.threads)
    return ["snr_db", "n_t", "i", "c_low", "c_up_kl", "c_up_simplified"], rows


def detect_crossovers(rows: list[list]) -> list[Crossover]:
    """SNRs where full multiplexing (``i == n_t``) overtakes every ``i < n_t``.

    ``rows`` are sweep-snr rows. The crossing is linearly interpolated between
    the bracketing SNR points.
    """
    found = []
    for n_t in sorted({r[1] for r in rows}):
        table: dict[float, dict[int, float]] = {}
        for snr, nt, i, *_, c_up in rows:
            if nt == n_t:
                table.setdefault(snr, {})[i] = c_up
        snrs = sorted(s for s in table if n_t in table[s] and len(table[s]) > 1)
        margins = []
        for s in snrs:
            others = {i: c for i, c in table[s].items() if i != n_t}
            best = max(others, key=others.get)
            margins.append((s, others[best] - table[s][n_t], best))
        for (s0, m0, b0), (s1, m1, _) in zip(margins, margins[1:]):
            if m0 > 0 >= m1:
                cross = s0 + (s1 - s0) * m0 / (m0 - m1)
                found.append(Crossover(n_t, cross, b0))
    return found


def cmd_sweep_hops(cfg: ExperimentConfig, raw: bool = False):
    n_t = cfg.n_t
    gains = cfg.gains(n_t, raw)

    def point(snr):
        noise = cfg.noise(n_t, snr)
        profile = [c_upper_simplified(gains, noise, i) for i in range(1, n_t + 1)]
        _finite(*profile)
        best = max(i for i, c in enumerate(profile, start=1) if c == max(profile))
        return [[snr, i, c, best] for i, c in enumerate(profile, start=1)]

    rows = [r for block in _pmap(point, list(cfg.snr_db), cfg.threads) for r in block]
    return ["snr_db", "i", "c_up_simplified", "argmax_i"], rows


def cmd_optimal_hops(cfg: ExperimentConfig, raw: bool = False) -> list[tuple[float, HopCountSearchResult]]:
    gains = cfg.gains(cfg.n_t, raw)
    return [(snr, find_optimal_hops(gains, cfg.noise(cfg.n_t, snr))) for snr in cfg.snr_db]


def format_optimal_report(results: list[tuple[float, HopCountSearchResult]]) -> str:
    lines = []
    for snr, res in results:
        lines.append(f"snr_db = {_fmt(snr)}")
        lines.append(f"i0 = {res.i0 if res.i0 is not None else 'none'}")
        lines.append(f"i_star = {res.i_star}")
        lines.append(f"c_star = {_fmt(res.c_star)}")
        lines.append("i,f_prime,c_up_simplified")
        for i in sorted(res.c_up_profile):
            lines.append(f"{i},{_fmt(res.f_prime[i])},{_fmt(res.c_up_profile[i])}")
        lines.append("")
    return "\n".join(lines)


def cmd_simulate(cfg: ExperimentConfig, force: bool = False, raw: bool = False):
    grid = _grid(cfg)
    for _, n_t, i in grid:
        _check_guard(n_t, i, force)

    def point(args):
        idx, (snr, n_t, i) = args
        gains, noise = cfg.gains(n_t, raw), cfg.noise(n_t, snr)
        cov = build_covariances(gains, noise, i)
        est = monte_carlo_mutual_info(cov, cfg.mc_samples, seed=[cfg.seed, idx])
        c_lo, c_kl = c_lower(cov), c_upper_kl(cov)
        _finite(est.estimate, est.std_err, c_lo, c_kl)
        slack = 3 * est.std_err
        if not (c_lo - slack <= est.estimate <= c_kl + slack):
            raise NumericalFailure(
                f"bound sandwich violated at snr={snr}, n_t={n_t}, i={i}: "
                f"c_low={c_lo}, mi={est.estimate}+-{est.std_err}, c_up_kl={c_kl}"
            )
        return [snr, n_t, i, est.estimate, est.std_err, c_lo, c_kl]

    rows = _pmap(point, list(enumerate(grid)), cfg.threads)
    return ["snr_db", "n_t", "i", "mi_estimate", "std_err", "c_low", "c_up_kl"], rows


def cmd_hop_pattern(cfg: ExperimentConfig):
    i = cfg.i_values[0]
    if i > cfg.n_t:
        raise ValueError(f"i={i} exceeds n_t={cfg.n_t}")
    rows = generate_hop_pattern(cfg.seed, cfg.n_hops, cfg.n_t, i).csv_rows()
    return rows[0], rows[1:]
