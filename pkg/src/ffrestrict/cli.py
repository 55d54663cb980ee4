"""Command-line entry point: ``ffrestrict {verify,scan,witness,energy,report}``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage,
contract or resource errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConsistencyError, ContractError, ResourceLimitError
from .experiments.config import EXPERIMENTS, FORMATS, default_config, load_config
from .experiments.runner import run

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ffrestrict", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", help="INI file with a [%s] section" % name)
        sp.add_argument("--seed", type=_u64)
        sp.add_argument("--out", help="write the report here instead of stdout")
        sp.add_argument("--format", choices=FORMATS)
        sp.add_argument("--jobs", type=int, default=1)
        sp.add_argument("--grid-cap", type=int, dest="grid_cap")
        sp.add_argument("--dims", type=_int_list, help="comma-separated dimensions")
        sp.add_argument("--qs", type=_int_list, help="comma-separated field sizes")
        sp.add_argument("--samples", type=int)
        sp.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None, **hooks) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        config = load_config(args.config, args.experiment) if args.config else default_config(args.experiment)
        config = config.with_overrides(
            seed=args.seed, out=args.out, format=args.format, grid_cap=args.grid_cap,
            dims=args.dims, qs=args.qs, samples=args.samples,
        )
        if args.jobs < 1:
            raise ContractError("--jobs must be >= 1")
        report = run(config, jobs=args.jobs, **hooks)
    except (ContractError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConsistencyError as exc:
        print(f"FAIL: consistency: {exc}", file=sys.stderr)
        return EXIT_FAIL

    text = report.render(config.output_format)
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not report.passed:
        for name in report.summary.get("failed_cells") or report.failed_checks:
            print(f"FAIL: {name}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_PASS


if __name__ == "__main__":
    sys.exit(main())
