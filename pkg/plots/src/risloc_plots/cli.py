"""Command-line rendering of simulator outputs."""

from __future__ import annotations

import argparse
import sys

from .io import NoDataError, SchemaError
from .render import KINDS, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="risloc-plots",
        description="Render plots from risloc sweep CSVs and spectrum grids",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p_render = sub.add_parser("render", help="render one plot from one input file")
    p_render.add_argument("--kind", required=True, choices=KINDS)
    p_render.add_argument("--in", dest="in_path", required=True, help="input CSV or grid file")
    p_render.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        render(args.kind, args.in_path, args.out)
    except (SchemaError, NoDataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
