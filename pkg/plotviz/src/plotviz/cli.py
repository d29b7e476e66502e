"""Command-line front end: plotviz --csv sweep.csv --out figure.png"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .render import PlotRequest, SchemaError, render


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}")


def _ylim(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected LOW,HIGH")
    try:
        low, high = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two numbers, got {text!r}")
    if not low < high:
        raise argparse.ArgumentTypeError("y limits must satisfy LOW < HIGH")
    return low, high


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plotviz", description=__doc__)
    parser.add_argument("--version", action="version", version=f"plotviz {__version__}")
    parser.add_argument("--csv", required=True, help="sweep CSV to plot")
    parser.add_argument("--out", required=True, help="output image (.png/.svg/.pdf)")
    parser.add_argument("--title", default=None)
    parser.add_argument(
        "--alpha",
        type=_fraction,
        default=None,
        help="target line height (defaults to the CSV's alpha)",
    )
    parser.add_argument("--ylim", type=_ylim, default=None, metavar="LOW,HIGH")
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        request = PlotRequest(
            csv_path=args.csv,
            out_path=args.out,
            title=args.title,
            alpha_line=args.alpha,
            y_limits=args.ylim,
        )
        out = render(request)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (SchemaError, OSError, ValueError) as exc:
        print(f"plotviz: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
