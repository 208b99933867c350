"""Command-line entry point ``oam-hopsim``.

Exit codes: 0 success, 2 configuration error, 3 guard refusal, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import config as cfgmod
from . import sweeps
from .config import ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_GUARD, EXIT_NUMERIC = 0, 2, 3, 4

COMMANDS = ("channel-gains", "sweep-snr", "sweep-hops", "optimal-hops", "simulate", "hop-pattern")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oam-hopsim", description="OAM mode-hopping index-modulation simulator")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="flat TOML key = value file")
    parser.add_argument("--out", dest="output", help="write output here instead of stdout")
    parser.add_argument("--force", action="store_true", help="allow KL-based bounds for K > 20000")
    parser.add_argument("--raw-channel", action="store_true", help="use unnormalised physical gains")
    overrides = parser.add_argument_group("config overrides (TOML value syntax, e.g. --snr-db '[-6, 0, 6]')")
    for name in cfgmod.FIELDS:
        if name == "output":
            continue
        overrides.add_argument(f"--{name.replace('_', '-')}", dest=f"set_{name}", metavar="VALUE")
    return parser


def resolve_config(args: argparse.Namespace) -> cfgmod.ExperimentConfig:
    base = cfgmod.load(args.config).to_dict() if args.config else {}
    for name in cfgmod.FIELDS:
        raw = getattr(args, f"set_{name}", None)
        if raw is not None:
            base[name] = cfgmod.parse_value(raw)
    if args.output is not None:
        base["output"] = args.output
    return cfgmod.from_mapping(base)


def run(args: argparse.Namespace) -> tuple[cfgmod.ExperimentConfig, str]:
    cfg = resolve_config(args)
    return cfg, _render(args, cfg)


def _render(args: argparse.Namespace, cfg: cfgmod.ExperimentConfig) -> str:
    cmd = args.command
    if cmd == "channel-gains":
        return sweeps.write_csv(*sweeps.cmd_channel_gains(cfg, raw=args.raw_channel))
    if cmd == "sweep-snr":
        header, rows = sweeps.cmd_sweep_snr(cfg, force=args.force, raw=args.raw_channel)
        for c in sweeps.detect_crossovers(rows):
            print(
                f"# crossover: n_t={c.n_t} full multiplexing overtakes i={c.best_i_below} at snr_db~{c.snr_db:.3f}",
                file=sys.stderr,
            )
        return sweeps.write_csv(header, rows)
    if cmd == "sweep-hops":
        return sweeps.write_csv(*sweeps.cmd_sweep_hops(cfg, raw=args.raw_channel))
    if cmd == "optimal-hops":
        return sweeps.format_optimal_report(sweeps.cmd_optimal_hops(cfg, raw=args.raw_channel))
    if cmd == "simulate":
        return sweeps.write_csv(*sweeps.cmd_simulate(cfg, force=args.force, raw=args.raw_channel))
    if cmd == "hop-pattern":
        return sweeps.write_csv(*sweeps.cmd_hop_pattern(cfg))
    raise AssertionError(cmd)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, text = run(args)
        if cfg.output:
            Path(cfg.output).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except sweeps.GuardRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (sweeps.NumericalFailure, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
