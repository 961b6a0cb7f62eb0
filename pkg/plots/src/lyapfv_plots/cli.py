"""Command-line entry: plot <kind> --in CSV... --out IMG [--log]."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .render import KINDS, PlotError, PlotJob, render


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="lyapfv-plot", description="Render solver CSV output as SVG figures"
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        help="input CSV paths")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--log", action="store_true", help="log-scale value axis")
    args = parser.parse_args(argv)
    try:
        render(PlotJob(kind=args.kind, inputs=tuple(args.inputs), output=args.out,
                       log_scale=args.log))
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
