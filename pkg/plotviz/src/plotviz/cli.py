"""Command line interface: render figures from a JSON spec or a CSV directory."""

from __future__ import annotations

import argparse
import sys

from .figspec import (ColumnMissingError, EmptyDataError, load_spec_file,
                      standard_figures)
from .render import render_all


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="h2ad-plotviz",
        description="Regenerate the standard figures from h2ad CSV outputs")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render figures")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--spec", metavar="PATH",
                       help="JSON figure spec (ids, input CSVs, outputs)")
    group.add_argument("--csv-dir", metavar="DIR",
                       help="render all five standard figures from this "
                            "harness output directory")
    p.add_argument("--out", metavar="DIR", required=True,
                   help="directory for the PNG/SVG files")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        specs = (load_spec_file(args.spec) if args.spec
                 else standard_figures(args.csv_dir))
        written = render_all(specs, args.out)
    except (ColumnMissingError, EmptyDataError, FileNotFoundError,
            ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for figure_id, paths in written.items():
        for path in paths:
            print(f"{figure_id}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
