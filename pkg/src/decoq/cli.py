"""Command line front end.

    decoq run --config run.json --out traj.csv
    decoq sweep --config sweep.json --out sweep.csv [--jobs N]
    decoq preset fig2_high_t [--emit-config run.json]
    decoq dump-coefficients --config run.json --out coeffs.csv

Exit status: 0 on success, 2 for configuration errors, 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor

from decoq.config import ConfigError, load_run_config, load_sweep_config, parse_run_config, preset, with_override
from decoq.model import NumericalError, ValidationError
from decoq.simulation import coefficient_table, simulate

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
SWEEP_COLUMNS = ("value", "t_d", "final_bloch_norm", "final_abs_rho01")

log = logging.getLogger("decoq")


def report_path(out) -> str:
    return f"{out}.report.txt"


def cmd_run(args) -> int:
    config = load_run_config(args.config)
    result = simulate(config)
    result.trajectory.write_csv(args.out)
    text = result.report.to_text()
    with open(report_path(args.out), "w") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return EXIT_OK


def _sweep_point(base_dict, parameter, value):
    try:
        config = parse_run_config(with_override(base_dict, parameter, value))
        result = simulate(config)
    except (ValidationError, NumericalError) as exc:
        return value, None, str(exc)
    traj = result.trajectory
    return value, (result.report.t_d_measured, float(traj.norms[-1]), float(abs(traj.coherences[-1]))), None


def _fmt(v) -> str:
    return "none" if v is None else f"{v:.17g}"


def cmd_sweep(args) -> int:
    sweep = load_sweep_config(args.config)
    n = len(sweep.values)
    tasks = ([sweep.base_dict] * n, [sweep.parameter] * n, list(sweep.values))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point, *tasks))
    else:
        results = list(map(_sweep_point, *tasks))
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for value, row, error in results:
            if error is not None:
                log.error("%s=%r failed: %s", sweep.parameter, value, error)
                writer.writerow([_fmt(value), "error", "error", "error"])
            else:
                writer.writerow([_fmt(value), *map(_fmt, row)])
    return EXIT_OK


def cmd_preset(args) -> int:
    config = preset(args.name)
    text = json.dumps(config.to_dict(), indent=2) + "\n"
    if args.emit_config:
        with open(args.emit_config, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_dump_coefficients(args) -> int:
    config = load_run_config(args.config)
    coefficient_table(config).write_csv(args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="decoq", description="Driven qubit decoherence under Ohmic and 1/f noise.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress information")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate one trajectory")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="scan one numeric parameter")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("preset", help="print or save a figure preset")
    p.add_argument("name")
    p.add_argument("--emit-config", metavar="FILE")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("dump-coefficients", help="write the coefficient table as CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dump_coefficients)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValidationError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
