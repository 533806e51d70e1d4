"""Command line entry point: phaseplot --csv sweep.csv --out plot.svg."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .render import THRESHOLDS, PlotError, PlotSpec, render

__all__ = ["main"]

EXIT_OK = 0
EXIT_IO = 1
EXIT_INPUT = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phaseplot",
        description=(
            "Render phase-transition curves (success frequency vs p, log "
            "scale, grouped by n/r/mode) from a sweep CSV as SVG."
        ),
    )
    parser.add_argument("--csv", required=True, help="input sweep CSV path")
    parser.add_argument("--out", required=True, help="output SVG path")
    parser.add_argument(
        "--overlay",
        action="append",
        default=[],
        choices=sorted(THRESHOLDS),
        help="named threshold to draw as a vertical guide (repeatable)",
    )
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    spec = PlotSpec(
        csv_path=Path(args.csv),
        out_path=Path(args.out),
        overlays=tuple(args.overlay),
    )
    try:
        out = render(spec)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
