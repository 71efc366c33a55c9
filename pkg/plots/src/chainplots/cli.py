"""Command-line front end: `chainplots render --preset NAME --in CSV --out IMG`."""
from __future__ import annotations

import argparse
import sys

from .errors import PlotError
from .recipes import RECIPES
from .render import render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainplots", description="Render figures from chaintransport CSVs."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure")
    p.add_argument(
        "--preset", required=True,
        help=f"figure name ({', '.join(sorted(RECIPES))})",
    )
    p.add_argument(
        "--in", dest="inputs", action="append", required=True, metavar="CSV",
        help="input CSV (repeat for multi-file figures)",
    )
    p.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        render(args.preset, args.inputs, args.out)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
