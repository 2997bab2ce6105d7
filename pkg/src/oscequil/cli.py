"""Command-line entry point: ``oscequil {verify,evolve,sweep}``.

Exit codes: 0 success, 1 invalid configuration, 2 numerical check failed,
3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import InvalidParam, OscEquilError
from .experiment import (SWEEP_PARAMS, ConfigError, RunConfig, write_evolve, write_sweep,
                         write_verify)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("oscequil")

# flag -> (config field, type)
OVERRIDES = {
    "--omega0": ("omega0", float),
    "--eta": ("eta", float),
    "--cutoff": ("cutoff", float),
    "--beta": ("beta", float),
    "--n-modes": ("n_modes", int),
    "--scheme": ("scheme", str),
    "--t-max": ("t_max", float),
    "--dt": ("dt", float),
    "--grid": ("grid", str),
    "--fit-channel": ("fit_channel", str),
    "--rel-tol": ("rel_tol", float),
    "--bath-file": ("bath_file", str),
    "--method": ("method", str),
}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat JSON file with RunConfig fields")
    common.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
    for flag, (dest, typ) in OVERRIDES.items():
        common.add_argument(flag, dest=dest, type=typ, default=None)
    common.add_argument("--fit-window", dest="fit_window", type=float, nargs=2,
                        metavar=("T_LO", "T_HI"), default=None)
    common.add_argument("--free-run", dest="free_run", action="store_true", default=None,
                        help="decouple the bath (control run); permits eta = 0")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="oscequil", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="check normal-mode identities")
    sub.add_parser("evolve", parents=[common], help="evolve the uncoupled thermal state")
    sweep = sub.add_parser("sweep", parents=[common], help="repeat evolve over a parameter")
    sweep.add_argument("--vary", required=True, choices=SWEEP_PARAMS)
    sweep.add_argument("--values", required=True, nargs="*", type=float)
    return parser


def _config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    changes = {dest: getattr(args, dest) for dest, _ in OVERRIDES.values()
               if getattr(args, dest) is not None}
    if args.fit_window is not None:
        changes["fit_window"] = list(args.fit_window)
    if args.free_run:
        changes["free_run"] = True
    if args.out is not None:
        changes["output_dir"] = str(args.out)
    cfg = cfg.replace(**changes)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        out = Path(cfg.output_dir)
        if args.command == "verify":
            report = write_verify(cfg, out)
            failing = [k for k, c in report["checks"].items() if not c["passed"]]
            for name in failing:
                c = report["checks"][name]
                print(f"FAIL {name}: {c['value']:.3g} >= {c['threshold']:g}", file=sys.stderr)
            print(f"verify: {'passed' if not failing else 'failed'} -> {out / 'verify.json'}")
            return EXIT_NUMERICAL if failing else EXIT_OK
        if args.command == "evolve":
            summary = write_evolve(cfg, out)
            fit = summary["decay_fit"]
            rate = f"{fit['rate']:.4g}" if "rate" in fit else fit.get("error")
            print(f"evolve: rate={rate} (eta/2={summary['predicted_rate']:.4g}), "
                  f"max|comm-1|={summary['max_comm_deviation']:.2e} -> {out}")
            for msg in summary["failures"]:
                print(f"FAIL {msg}", file=sys.stderr)
            return EXIT_NUMERICAL if summary["failed"] else EXIT_OK
        rows = write_sweep(cfg, args.vary, args.values, out)
        print(f"sweep: {len(rows)} rows -> {out / 'sweep.csv'}")
        return EXIT_OK
    except (ConfigError, InvalidParam, json.JSONDecodeError, TypeError) as exc:
        print(f"oscequil: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OscEquilError as exc:
        print(f"oscequil: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"oscequil: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
