"""qnamp-plot: regenerate the figures from engine CSVs.

Subcommands mirror the figure types; every one takes --in and --out.
Exit codes: 0 success, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import (
    AMP_SOURCES,
    IFO_SOURCES,
    render_budget,
    render_gain,
    render_mass_sweep,
    render_triptych,
)
from .tables import EmptyTableError, MissingColumnError


def cmd_budget(args) -> int:
    sources = args.sources.split(",") if args.sources else None
    if args.subset == "amp":
        sources = list(AMP_SOURCES)
    elif args.subset == "ifo":
        sources = list(IFO_SOURCES)
    files = render_budget(args.infile, Path(args.out) / args.name,
                          compare_csv=args.compare, sources=sources,
                          title=args.title)
    print("\n".join(files))
    return 0


def cmd_gain(args) -> int:
    files, crossing = render_gain(args.infile, Path(args.out) / args.name,
                                  title=args.title)
    print("\n".join(files))
    print(f"unity_crossing_hz = {crossing:.1f}")
    return 0


def cmd_mass_sweep(args) -> int:
    labels = (args.labels.split(",") if args.labels
              else [Path(p).stem for p in args.infiles])
    files = render_mass_sweep(args.infiles, labels,
                              Path(args.out) / args.name, title=args.title)
    print("\n".join(files))
    return 0


def cmd_triptych(args) -> int:
    files = render_triptych(args.infile, args.compare,
                            Path(args.out) / args.name, title=args.title)
    print("\n".join(files))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qnamp-plot")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("budget", help="per-source budget figure")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--compare", help="second budget CSV (total drawn dashed)")
    p.add_argument("--sources", help="comma list of source columns to draw")
    p.add_argument("--subset", choices=["amp", "ifo"],
                   help="predefined source subsets")
    p.add_argument("--out", default=".")
    p.add_argument("--name", default="budget")
    p.add_argument("--title")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("gain", help="gain curve with unity annotation")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--name", default="gain")
    p.add_argument("--title")
    p.set_defaults(func=cmd_gain)

    p = sub.add_parser("mass-sweep", help="overlaid totals per mass")
    p.add_argument("--in", dest="infiles", nargs="+", required=True)
    p.add_argument("--labels", help="comma list matching the inputs")
    p.add_argument("--out", default=".")
    p.add_argument("--name", default="mass_sweep")
    p.add_argument("--title")
    p.set_defaults(func=cmd_mass_sweep)

    p = sub.add_parser("triptych", help="comparison + both sub-budgets")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--compare", required=True)
    p.add_argument("--out", default=".")
    p.add_argument("--name", default="triptych")
    p.add_argument("--title")
    p.set_defaults(func=cmd_triptych)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MissingColumnError, EmptyTableError, FileNotFoundError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
