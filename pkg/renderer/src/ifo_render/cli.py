"""`render-figures --in <dir> --out <dir> [--style <file>]`.

Scans a sweep output directory for the known CSV schemas and renders the
standard figure set. Exit 0 on success, 2 when inputs are missing or
malformed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import matplotlib

from .plots import PlotSpec, RenderError, discover, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render-figures",
        description="Render interferometer sweep CSVs into figures.",
    )
    parser.add_argument("--in", dest="in_dir", type=Path, required=True,
                        help="directory holding the sweep CSV outputs")
    parser.add_argument("--out", dest="out_dir", type=Path, required=True,
                        help="directory to write images into")
    parser.add_argument("--style", type=Path, default=None,
                        help="matplotlib rc file applied before rendering")
    args = parser.parse_args(argv)
    if args.style is not None:
        if not args.style.exists():
            print(f"render-figures: style file not found: {args.style}",
                  file=sys.stderr)
            return 2
        matplotlib.rc_file(args.style, use_default_template=False)
    if not args.in_dir.is_dir():
        print(f"render-figures: input directory not found: {args.in_dir}",
              file=sys.stderr)
        return 2
    specs = discover(args.in_dir)
    if not specs:
        print(f"render-figures: no renderable CSVs in {args.in_dir}",
              file=sys.stderr)
        return 2
    try:
        for spec in specs:
            out = render(replace(spec, output=args.out_dir / spec.output.name))
            print(out)
    except RenderError as exc:
        print(f"render-figures: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
