"""Command line sweep runner.

    sweep --config cfg.json [--output out.csv] [--methods dqme,dme,fme]
          [--threads N] [--plot]

Exit codes: 0 on success, 1 on configuration or I/O problems, 2 when a
numerical pipeline fails mid-sweep.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .sweep import ConfigError, SweepError, emit_csv, load_config, run_sweep

__all__ = ["build_parser", "entry", "main"]


class _Parser(argparse.ArgumentParser):
    # bad usage is a configuration problem, keep it on exit code 1
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="sweep",
        description="Sweep steady-state energy currents of a driven "
                    "dissipative model and write them as CSV.")
    parser.add_argument("--config", required=True,
                        help="path to a JSON sweep configuration")
    parser.add_argument("--output", default=None,
                        help="CSV destination (default: the config's output "
                             "entry, else <config name>.csv)")
    parser.add_argument("--methods", default=None,
                        help="comma-separated subset of dqme,dme,fme "
                             "(default: the config's methods)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for independent sweep points")
    parser.add_argument("--plot", action="store_true",
                        help="also render the currents as a PNG figure "
                             "next to the CSV")
    return parser


def _resolve_output(args, cfg) -> Path:
    if args.output is not None:
        return Path(args.output)
    if cfg.output is not None:
        return Path(cfg.output)
    return Path(Path(args.config).stem + ".csv")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        methods = None
        if args.methods is not None:
            methods = [m.strip() for m in args.methods.split(",") if m.strip()]
        out_path = _resolve_output(args, cfg)
        rows = run_sweep(cfg, methods=methods, threads=args.threads)
        emit_csv(rows, out_path)
        if args.plot:
            from .plotting import render_sweep_figure
            render_sweep_figure(rows, out_path.with_suffix(".png"))
    except (ConfigError, OSError) as exc:
        print(f"sweep: error: {exc}", file=sys.stderr)
        return 1
    except SweepError as exc:
        print(f"sweep: numerical failure: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out_path}")
    return 0


def entry() -> None:
    sys.exit(main())
