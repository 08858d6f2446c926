"""Command-line wrapper: one figure per invocation."""

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, plot


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="uavhetnet-plot",
        description="Render a figure from an evaluator sweep CSV "
                    "(analytical lines, simulation markers with error bars)")
    parser.add_argument("--csv", type=Path, required=True)
    parser.add_argument("--kind", choices=sorted(FIGURE_KINDS), required=True)
    parser.add_argument("--out", type=Path, required=True)
    args = parser.parse_args(argv)
    return plot(args.csv, args.kind, args.out)


if __name__ == "__main__":
    sys.exit(main())
