"""
Command line front-end.

    fgnanoplate solve CONFIG [--out PATH] [--modes K]
    fgnanoplate sweep CONFIG [--out PATH] [--modes K] [--workers N]
    fgnanoplate converge CONFIG [--out PATH]
    fgnanoplate validate [--out PATH] [--workers N] [--kappa K]

Exit status: 0 success, 1 failed rows or validation checks, 2 input error.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys

from .config import load_config
from .errors import ConfigError, FgNanoplateError
from .runner import deltas_shrinking, run_converge, run_solve, run_sweep, write_convergence_csv, write_csv
from .validate import run_validate

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

log = logging.getLogger("fgnanoplate")


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _load(args):
    config = load_config(args.config)
    if getattr(args, "modes", None) is not None:
        config = config.with_updates(modes=args.modes)
    return config


def _cmd_solve(args) -> int:
    rows = run_solve(_load(args))
    with _output(args.out) as fh:
        write_csv(rows, fh)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    result = run_sweep(_load(args), workers=args.workers)
    with _output(args.out) as fh:
        write_csv(result.rows, fh)
    for row in result.failures:
        log.error("failed: a/b=%g a/h=%g n=%g mu=%g %s mode %d: %s",
                  row.a_b_ratio, row.a_h_ratio, row.n, row.mu, row.bc, row.mode, row.error)
    return EXIT_OK if result.ok else EXIT_FAILED


def _cmd_converge(args) -> int:
    rows = run_converge(_load(args))
    with _output(args.out) as fh:
        write_convergence_csv(rows, fh)
    if len(rows) > 2 and not deltas_shrinking(rows):
        log.warning("refinement deltas are not monotonically shrinking")
    return EXIT_OK


def _cmd_validate(args) -> int:
    report = run_validate(kappa=args.kappa, workers=args.workers)
    with _output(args.out) as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    if not args.quiet:
        print(report.summary(), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--workers", type=int, default=1, help="concurrent solves")
    common.add_argument("--quiet", action="store_true", help="only report errors")

    parser = argparse.ArgumentParser(
        prog="fgnanoplate",
        description="Free vibration of functionally graded nonlocal Mindlin nanoplates (NURBS FEM).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="single analysis, CSV of modes")
    p.add_argument("config")
    p.add_argument("--modes", type=int)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", parents=[common], help="cartesian parameter sweep to CSV")
    p.add_argument("config")
    p.add_argument("--modes", type=int)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("converge", parents=[common], help="mesh convergence of the fundamental frequency")
    p.add_argument("config")
    p.add_argument("--modes", type=int, help=argparse.SUPPRESS)
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("validate", parents=[common], help="check against the embedded reference tables")
    p.add_argument("--kappa", type=float, default=5.0 / 6.0, help="shear correction factor")
    p.set_defaults(func=_cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if getattr(args, "modes", None) is not None and args.modes < 1:
        parser.error("--modes must be >= 1")
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except FgNanoplateError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
