"""Command-line figure renderer.

One figure per invocation:

    figrender render --csv results.csv --kind emse-trace --out fig/convergence

writes ``fig/convergence.svg`` and ``fig/convergence.png``.  ``--series``
narrows the plotted columns; ``--xlabel``/``--ylabel`` override the
kind's axis labels.  Exit status 0 on success, 1 on any error.
"""

import argparse
import sys
from pathlib import Path

from .render import KINDS, FigureSpec, RenderError, render

__all__ = ["main"]


def _cmd_render(args):
    series = tuple(s for s in args.series.split(",") if s) if args.series else None
    svg_path, png_path = render(FigureSpec(
        csv=Path(args.csv), kind=args.kind, out=Path(args.out),
        series=series, xlabel=args.xlabel, ylabel=args.ylabel))
    print(svg_path)
    print(png_path)
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="figrender",
        description="Render experiment CSVs to SVG + PNG figures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_render = sub.add_parser("render", help="render one figure")
    p_render.add_argument("--csv", required=True, help="input CSV file")
    p_render.add_argument("--kind", required=True, choices=sorted(KINDS),
                          help="figure kind")
    p_render.add_argument("--out", required=True,
                          help="output image path (suffix ignored; both "
                               ".svg and .png are written)")
    p_render.add_argument("--series", default=None,
                          help="comma-separated columns to plot "
                               "(default: the kind's own selection)")
    p_render.add_argument("--xlabel", default=None, help="x-axis label override")
    p_render.add_argument("--ylabel", default=None, help="y-axis label override")
    p_render.set_defaults(func=_cmd_render)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RenderError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
