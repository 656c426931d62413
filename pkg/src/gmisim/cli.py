"""Command-line entry point: `ifo <mode> --config <path> --out <dir> ...`.

Exit codes: 0 success, 1 validation-mode check failure, 2 configuration or
input error, 3 solver error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import ResonanceSingularityError, ValidationError
from .network import NetworkStructureError
from .runner import run_sweep
from .scenario import MODES, PRESETS, parse_scenario


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifo",
        description="Frequency-domain interferometer sweeps; CSV and JSON out.",
    )
    sub = parser.add_subparsers(dest="mode", required=True, metavar="mode")
    for mode in MODES:
        p = sub.add_parser(mode, help=f"run the {mode} mode")
        p.add_argument("--config", type=Path, default=None,
                       help="scenario file (TOML); defaults apply when omitted")
        p.add_argument("--out", type=Path, required=True,
                       help="output directory for CSV/JSON products")
        p.add_argument("--preset", choices=PRESETS, default=None,
                       help="override the scenario preset")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override a config value, e.g. bias.phi_n_deg=0.02")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = parse_scenario(args.config, args.overrides, args.preset)
        config_dir = args.config.parent if args.config else None
        result = run_sweep(config, args.mode, args.out, config_dir)
    except (ValidationError, NetworkStructureError, OSError) as exc:
        print(f"ifo: configuration error: {exc}", file=sys.stderr)
        return 2
    except ResonanceSingularityError as exc:
        print(f"ifo: solver error: {exc}", file=sys.stderr)
        return 3
    for path in result.files:
        print(path)
    if not result.ok:
        print("ifo: validation check failed (see report)", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
