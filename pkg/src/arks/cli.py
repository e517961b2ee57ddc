"""Command-line entry point.

Subcommands: run, sweep, convergence, verify, presets.  Exit codes: 0 success,
1 configuration error, 2 solver failure, 3 verdict failure under
``verify --strict``.  There is no RNG anywhere in the pipeline, so identical
invocations produce bitwise-identical artifacts (seedless by construction).
"""

from __future__ import annotations

import argparse
import sys

from . import experiments, presets
from .config import load_config
from .errors import ArksError, ConfigError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2
EXIT_VERDICT = 3


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="arks",
        description="attraction-repulsion chemotaxis laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, kinds in (
        ("run", ("single", "eps_family")),
        ("sweep", ("sweep",)),
        ("convergence", ("convergence",)),
    ):
        p = sub.add_parser(name, help=f"execute a {'/'.join(kinds)} experiment")
        p.add_argument("config", help="path to a TOML experiment config")
        p.add_argument("--output", default=None, help="artifact directory")
        p.add_argument("--workers", type=int, default=1, help="sweep worker pool size")
        p.add_argument(
            "--seedless",
            action="store_true",
            default=True,
            help="run without RNG (the default and only mode; kept for interface stability)",
        )
        p.set_defaults(kinds=kinds)

    v = sub.add_parser("verify", help="recompute verdicts from stored CSV")
    v.add_argument("run_dir")
    v.add_argument("--strict", action="store_true",
                   help="exit 3 when any verdict fails or mismatches the stored one")

    pr = sub.add_parser("presets", help="list or show shipped presets")
    pr.add_argument("action", choices=("list", "show"))
    pr.add_argument("name", nargs="?")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "presets":
        if args.action == "list":
            for name in presets.available():
                print(name)
            return EXIT_OK
        if not args.name:
            print("presets show requires a name", file=sys.stderr)
            return EXIT_CONFIG
        try:
            print(presets.text(args.name), end="")
        except ConfigError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        return EXIT_OK

    if args.command == "verify":
        try:
            verdicts, all_pass, mismatches = experiments.verify_run(
                args.run_dir, strict=args.strict
            )
        except ArksError as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        for v in verdicts:
            print(f"{'PASS' if v.passed else 'FAIL'}  {v.functional}  [{v.mode}]")
        for name in mismatches:
            print(f"MISMATCH  {name} (stored verdict differs)")
        if args.strict and not all_pass:
            return EXIT_VERDICT
        return EXIT_OK

    # run / sweep / convergence
    try:
        cfg = load_config(args.config)
        if cfg.kind not in args.kinds:
            raise ConfigError(
                f"[experiment] kind={cfg.kind!r} does not match subcommand "
                f"{args.command!r} (expected one of {args.kinds})"
            )
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = args.output or cfg.output
    try:
        summary = experiments.run_experiment(cfg, out_dir, workers=args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArksError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    print(f"artifacts written to {out_dir}")
    for key, val in summary.items():
        print(f"  {key}: {val}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
