"""Command-line entry points: single trials, sweeps, and spectrum dumps."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace

from .errors import ConfigurationError
from .harness import ExperimentConfig, dump_spectrum, run_sweep, trial_json, write_csv


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risloc",
        description="Monte-Carlo simulator for a three-stage RIS uplink channel estimator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run the configured sweep and write a CSV")
    p_sweep.add_argument("--config", required=True, help="JSON experiment config")
    p_sweep.add_argument("--trials", type=int, default=None, help="override trial count")
    p_sweep.add_argument("--seed", type=int, default=None, help="override base seed")
    p_sweep.add_argument("--workers", type=int, default=None, help="override worker processes")
    p_sweep.add_argument("--out", default="results.csv", help="output CSV path")

    p_spectrum = sub.add_parser("spectrum", help="dump one trial's 2D pseudo-spectrum grid")
    p_spectrum.add_argument("--config", required=True, help="JSON experiment config")
    p_spectrum.add_argument("--out", required=True, help="output grid text file")
    p_spectrum.add_argument("--seed", type=int, default=None, help="override base seed")
    p_spectrum.add_argument("--point", type=int, default=0, help="sweep point index")
    p_spectrum.add_argument("--trial", type=int, default=0, help="trial index within the point")

    p_trial = sub.add_parser("trial", help="run one trial and print a JSON record")
    p_trial.add_argument("--config", required=True, help="JSON experiment config")
    p_trial.add_argument("--seed", type=int, default=None, help="override base seed")
    p_trial.add_argument("--point", type=int, default=0, help="sweep point index")
    p_trial.add_argument("--trial", type=int, default=0, help="trial index within the point")
    return parser


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.from_json(args.config)
    overrides = {}
    for name in ("trials", "seed", "workers"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    return replace(cfg, **overrides) if overrides else cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "sweep":
            def progress(point, summary, total):
                print(
                    f"[{point.index + 1}/{total}] snr={summary.snr_db:g} dB "
                    f"L={summary.n_blocks} ris={summary.n_x}x{summary.n_y} "
                    f"nmse={summary.nmse_db_proposed:.2f} dB "
                    f"(oracle {summary.nmse_db_oracle:.2f}) "
                    f"failures={summary.failures} [{summary.wall_time_s:.1f}s]",
                    flush=True,
                )

            result = run_sweep(cfg, progress=progress)
            write_csv(result, args.out)
            print(f"wrote {args.out}")
        elif args.command == "spectrum":
            dump_spectrum(cfg, args.out, point_index=args.point, trial_index=args.trial)
            print(f"wrote {args.out}")
        elif args.command == "trial":
            record = trial_json(cfg, point_index=args.point, trial_index=args.trial)
            print(json.dumps(record))
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
