"""Time the compiled and pure-Python kernel backends on the same workloads.

Usage::

    python benchmarks/bench_kernels.py [--n-t 16] [--i 9] [--threads 1] [--repeat 1]
"""

import argparse
import time

import numpy as np

from oam_hopsim import kernels
from oam_hopsim.bounds import build_covariances
from oam_hopsim.config import ExperimentConfig


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-t", type=int, default=16)
    ap.add_argument("--i", type=int, default=9)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=1)
    ap.add_argument("--samples", type=int, default=20_000)
    args = ap.parse_args()

    cfg = ExperimentConfig(n_t=args.n_t)
    cov = build_covariances(cfg.gains(), cfg.noise(args.n_t, 0.0), args.i).full
    q = np.random.default_rng(0).exponential(1.0, (args.samples, args.n_t)) * cov[0]
    print(f"n_t={args.n_t} i={args.i} K={cov.shape[0]} threads={args.threads} backends={sorted(kernels.BACKENDS)}")

    workloads = {
        "kl_row_sums": lambda b: kernels.kl_row_sums(cov, args.threads, b),
        "overlap_row_sums": lambda b: kernels.overlap_row_sums(cov, args.threads, b),
        "mixture_logsumexp": lambda b: kernels.mixture_logsumexp(q, cov, args.threads, b),
    }
    print(f"{'kernel':<20}{'backend':<10}{'seconds':>10}{'speedup':>10}{'max rel diff':>15}")
    for name, fn in workloads.items():
        t_py, ref = best_of(lambda: fn("python"), args.repeat)
        print(f"{name:<20}{'python':<10}{t_py:>10.3f}{1.0:>10.2f}{'':>15}")
        if "compiled" in kernels.BACKENDS:
            t_c, out = best_of(lambda: fn("compiled"), args.repeat)
            diff = np.max(np.abs(out - ref) / np.maximum(np.abs(ref), 1e-300))
            print(f"{name:<20}{'compiled':<10}{t_c:>10.3f}{t_py / t_c:>10.2f}{diff:>15.2e}")


if __name__ == "__main__":
    main()
