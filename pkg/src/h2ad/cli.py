"""Command line interface.

Subcommands: number-sensing, doa, complexity, train, crlb-sweep.
Exit codes: 0 success, 2 configuration error, 3 runtime numeric error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .exceptions import (ConfigurationError, DegenerateModelError,
                         IllPosedSceneError, NumericError, ParameterError)
from .harness import (apply_config_file, apply_profile, complexity_defaults,
                      doa_defaults, number_sensing_defaults,
                      run_complexity_benchmark, run_crlb_sweep,
                      run_doa_experiment, run_number_sensing_experiment,
                      train_models)

_DEFAULTS = {
    "number-sensing": number_sensing_defaults,
    "doa": doa_defaults,
    "complexity": complexity_defaults,
    "crlb-sweep": doa_defaults,
    "train": number_sensing_defaults,
}

_RUNNERS = {
    "number-sensing": run_number_sensing_experiment,
    "doa": run_doa_experiment,
    "complexity": run_complexity_benchmark,
    "crlb-sweep": run_crlb_sweep,
    "train": train_models,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="h2ad",
        description="H2AD receiver experiments: source-number sensing, DOA "
                    "estimation, complexity benchmarks, CRLB sweeps")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("number-sensing", "accuracy of the source-count estimators vs SNR"),
        ("doa", "direction estimation accuracy/RMSE vs SNR with CRLB"),
        ("complexity", "fuser operation counts vs array size"),
        ("train", "generate the dataset and train the neural counters"),
        ("crlb-sweep", "CRLB vs SNR for the DOA scene"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", metavar="PATH",
                       help="key=value config file overriding the defaults")
        p.add_argument("--out", metavar="DIR", help="output directory")
        p.add_argument("--seed", type=int, metavar="N", help="master seed")
        p.add_argument("--trials", type=int, metavar="N",
                       help="Monte Carlo trials per sweep point")
        p.add_argument("--profile", choices=("smoke", "paper"),
                       help="smoke: sub-minute runs; paper: 5000 trials")
    return parser


def _configure(args) -> object:
    cfg = _DEFAULTS[args.command]()
    if args.config:
        cfg = apply_config_file(cfg, args.config)
    cfg = apply_profile(cfg, args.profile)
    overrides = {}
    if args.out:
        overrides.update(out_dir=args.out, model_dir=args.out)
    if args.seed is not None:
        overrides.update(seed=args.seed)
    if args.trials is not None:
        overrides.update(trials=args.trials)
    return replace(cfg, **overrides) if overrides else cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _configure(args)
        paths = _RUNNERS[args.command](cfg)
    except (NumericError, IllPosedSceneError, np.linalg.LinAlgError,
            FloatingPointError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except (ConfigurationError, ParameterError, DegenerateModelError,
            ValueError) as exc:
        # scene/geometry validation errors are configuration errors too
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
