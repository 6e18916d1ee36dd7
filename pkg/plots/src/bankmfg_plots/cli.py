"""render_figures: draw images from a solver figure manifest.

Usage:
    render_figures <manifest> [--figures F1,F4] --out DIR

Reads only the CSV files named by the manifest; re-running overwrites only
the image files it owns.
"""

from __future__ import annotations

import argparse
import sys

from .render import render
from .spec import specs_from_manifest


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="render_figures", description=__doc__)
    parser.add_argument("manifest", help="manifest.txt written by the solver's figure runs")
    parser.add_argument("--figures", default=None,
                        help="comma-separated tags (default: all tags in the manifest)")
    parser.add_argument("--out", required=True, help="directory for the image files")
    args = parser.parse_args(argv)
    figures = args.figures.split(",") if args.figures else None
    try:
        specs = specs_from_manifest(args.manifest, args.out, figures)
        for spec in specs:
            path = render(spec)
            print(f"wrote {path}")
    except (KeyError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
