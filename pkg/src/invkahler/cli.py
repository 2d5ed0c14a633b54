"""Command line entry point: ``invkahler {verify,polar,potential}``.

Exit codes: 0 for KAHLER or PASS, 2 for a negative verdict, 1 for errors.
"""
from __future__ import annotations

import argparse
import sys

from .report import NEGATIVE, RunConfig, emit_csv, load_config, run, write_report, dumps

SUBCOMMAND_CHECKS = {
    "verify": ("admissible", "integrable", "closed", "kaehler", "polar", "quasi_equivariance", "potential"),
    "polar": ("admissible", "integrable", "polar", "quasi_equivariance"),
    "potential": ("admissible", "potential"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="invkahler", description="Verify invariant Kähler structures.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("verify", "full pipeline: admissibility, integrability, closedness, Kähler verdict, polar map, potential"),
        ("polar", "polar-map checks only"),
        ("potential", "Kähler potential check only"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file; flags override its entries")
        p.add_argument("--group", help="su2, so3, su3, u1^n or a path to an algebra JSON")
        p.add_argument("--structure", help="standard, rescaled:<family>, custom:<path>, fixture:<name>")
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--radius", type=float)
        p.add_argument("--h", type=float)
        p.add_argument("--tau", type=float)
        p.add_argument("--out", dest="output", help="write the JSON report here instead of stdout")
        p.add_argument("--csv", help="also write per-point residuals as CSV")
        p.add_argument("--workers", type=int)
        p.add_argument("--polar-samples", dest="polar_samples", type=int)
        p.add_argument("--steps", type=int)
        p.add_argument("--timing", action="store_true", help="record wall time in the report")
    return parser


def config_from_args(args) -> RunConfig:
    doc = load_config(args.config) if args.config else {}
    doc.setdefault("checks", list(SUBCOMMAND_CHECKS[args.command]))
    for key in ("group", "structure", "samples", "seed", "radius", "h", "tau", "output", "workers", "polar_samples", "steps"):
        val = getattr(args, key)
        if val is not None:
            doc[key] = val
    return RunConfig.from_dict(doc)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        report = run(config, timing=args.timing)
        if config.output:
            write_report(report, config.output)
        else:
            sys.stdout.write(dumps(report))
        if args.csv:
            emit_csv(report, args.csv)
    except Exception as exc:  # any failure is an error exit, with a diagnostic
        print(f"invkahler: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(f"verdict: {report['verdict']}", file=sys.stderr)
    return 2 if report["verdict"] in NEGATIVE else 0


if __name__ == "__main__":
    sys.exit(main())
