"""Command line for rendering charts from bench CSVs."""

from __future__ import annotations

import argparse
import sys

from .charts import KINDS, SCALES, ChartError, ChartSpec, render


def build_parser():
    p = argparse.ArgumentParser(
        prog="spanlab-plots render",
        description="Render a static chart from a spanlab bench CSV.",
    )
    p.add_argument("--csv", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--group", default=None)
    p.add_argument("--scale", choices=SCALES, default="linear")
    p.add_argument("--fit", choices=["none", "linear"], default="none")
    p.add_argument("--kind", choices=KINDS, default="line")
    p.add_argument("--filter", action="append", default=[],
                   metavar="COL=VALUE", help="keep only matching rows (repeatable)")
    p.add_argument("--out", required=True)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    filters = {}
    for item in args.filter:
        if "=" not in item:
            print(f"bad --filter {item!r}, expected COL=VALUE", file=sys.stderr)
            return 2
        col, val = item.split("=", 1)
        filters[col] = val
    try:
        spec = ChartSpec(
            csv=args.csv, x=args.x, y=args.y, out=args.out, group=args.group,
            scale=args.scale, fit=args.fit, kind=args.kind, filters=filters,
        )
        reports = render(spec)
    except ChartError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for line in reports:
        print(line)
    print(f"wrote {args.out}")
    return 0


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
