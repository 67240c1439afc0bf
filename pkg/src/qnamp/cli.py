"""Command-line interface: noise budgets, gain curves, design optimization,
coating design and mass sweeps, with CSV + manifest outputs.

Exit codes: 0 success, 2 configuration error, 3 physics/evaluation error,
4 optimizer infeasibility.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .budget import (
    SOURCE_LABELS,
    ChainConfig,
    InfeasibleBoundsError,
    budget,
    gain_curve,
    mass_sweep,
    midband_cost,
    optimize,
    preset,
)
from .coating import InfeasibleStackError, export_stack, optimize_stack, stack_transmission
from .config_io import ConfigError, config_hash, from_chain, parse_config, serialize_config

EXIT_OK, EXIT_CONFIG, EXIT_PHYSICS, EXIT_INFEASIBLE = 0, 2, 3, 4


class _CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _load_config(args) -> ChainConfig:
    if args.config is None and args.preset is None:
        raise _CliError(EXIT_CONFIG, "need --config PATH or --preset NAME")
    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise _CliError(EXIT_CONFIG, f"config file not found: {path}")
        try:
            cfg = to_chain_checked(path.read_text())
        except ConfigError as exc:
            raise _CliError(EXIT_CONFIG, f"{path}: {exc}")
    else:
        try:
            cfg = preset(args.preset)
        except KeyError as exc:
            raise _CliError(EXIT_CONFIG, str(exc))
    if getattr(args, "no_amp", False):
        cfg = replace(cfg, amplifier_on=False)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def to_chain_checked(text: str) -> ChainConfig:
    from .config_io import to_chain

    return to_chain(parse_config(text))


def _write_csv(path: Path, header, columns):
    """RFC-4180-style CSV with shortest-round-trip float formatting."""
    rows = zip(*[np.asarray(col) for col in columns])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])


def _write_manifest(path: Path, cfg: ChainConfig, extra=None):
    lines = ["[manifest]",
             f"engine_version = {__version__}",
             f"config_hash = {config_hash(from_chain(cfg))}",
             f"seed = {cfg.seed}"]
    for key, val in (extra or {}).items():
        lines.append(f"{key} = {val}")
    path.write_text("\n".join(lines) + "\n")


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_budget(args) -> int:
    cfg = _load_config(args)
    out = _outdir(args)
    try:
        b = budget(cfg)
    except (ValueError, KeyError) as exc:
        raise _CliError(EXIT_PHYSICS, f"budget evaluation failed: {exc}")
    if not np.all(np.isfinite(b.total)):
        raise _CliError(EXIT_PHYSICS,
                        "budget is not finite on the grid (check resonances)")
    header = ["f_hz", *SOURCE_LABELS, "total"]
    cols = [cfg.grid.f_hz, *[b.sources[k] for k in SOURCE_LABELS], b.total]
    _write_csv(out / "budget.csv", header, cols)
    _write_manifest(out / "budget_manifest.ini", cfg,
                    {"columns": ",".join(header),
                     "amplifier_on": cfg.amplifier_on})
    (out / "config.ini").write_text(serialize_config(from_chain(cfg)))
    print(f"wrote {out / 'budget.csv'}")
    return EXIT_OK


def cmd_gain(args) -> int:
    cfg = _load_config(args)
    out = _outdir(args)
    try:
        g_readout, g_ref = gain_curve(cfg)
    except (ValueError, KeyError) as exc:
        raise _CliError(EXIT_PHYSICS, f"gain evaluation failed: {exc}")
    header = ["f_hz", "gain_readout", "gain_reference"]
    _write_csv(out / "gain.csv", header, [cfg.grid.f_hz, g_readout, g_ref])
    _write_manifest(out / "gain_manifest.ini", cfg,
                    {"columns": ",".join(header)})
    print(f"wrote {out / 'gain.csv'}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    cfg = _load_config(args)
    out = _outdir(args)
    try:
        best, info = optimize(cfg, max_iter=args.max_iter)
    except InfeasibleBoundsError as exc:
        raise _CliError(EXIT_INFEASIBLE, f"optimizer infeasible: {exc}")
    (out / "optimized_config.ini").write_text(serialize_config(from_chain(best)))
    b = budget(best)
    header = ["f_hz", *SOURCE_LABELS, "total"]
    cols = [best.grid.f_hz, *[b.sources[k] for k in SOURCE_LABELS], b.total]
    _write_csv(out / "budget.csv", header, cols)
    _write_manifest(out / "optimize_manifest.ini", best,
                    {"cost": repr(info["cost"]),
                     "start_cost": repr(info["start_cost"]),
                     **{f"param_{k.replace('.', '_')}": repr(v)
                        for k, v in info["params"].items()}})
    print(f"wrote {out / 'optimized_config.ini'} (cost {info['cost']:.6f})")
    return EXIT_OK


def cmd_coating(args) -> int:
    out = _outdir(args)
    try:
        stack = optimize_stack(n_pairs=args.pairs, t_max=args.t_max,
                               seed=args.seed if args.seed is not None else 0)
    except InfeasibleStackError as exc:
        raise _CliError(EXIT_INFEASIBLE, str(exc))
    (out / "coating_stack.txt").write_text(export_stack(stack))
    _, t = stack_transmission(stack)
    (out / "coating_manifest.ini").write_text(
        "[manifest]\n"
        f"engine_version = {__version__}\n"
        f"seed = {args.seed if args.seed is not None else 0}\n"
        f"transmission = {t!r}\n"
        f"t_max = {args.t_max!r}\n")
    print(f"wrote {out / 'coating_stack.txt'} (T = {t:.3g})")
    return EXIT_OK


def _parse_masses(spec: str):
    masses = []
    for tok in spec.split(","):
        tok = tok.strip().lower()
        if tok.endswith("kg"):
            masses.append(float(tok[:-2]))
        elif tok.endswith("g"):
            masses.append(float(tok[:-1]) * 1e-3)
        else:
            masses.append(float(tok))
    return masses


def cmd_mass_sweep(args) -> int:
    cfg = _load_config(args)
    out = _outdir(args)
    try:
        masses = _parse_masses(args.masses)
    except ValueError:
        raise _CliError(EXIT_CONFIG, f"cannot parse masses {args.masses!r}")
    results = mass_sweep(cfg, masses, optimize_each=not args.no_optimize,
                         max_iter=args.max_iter)
    files = []
    for mass, (cm, b) in zip(masses, results):
        tag = f"{mass * 1e3:g}g"
        header = ["f_hz", *SOURCE_LABELS, "total"]
        cols = [cm.grid.f_hz, *[b.sources[k] for k in SOURCE_LABELS], b.total]
        name = f"budget_{tag}.csv"
        _write_csv(out / name, header, cols)
        files.append(name)
    _write_manifest(out / "mass_sweep_manifest.ini", cfg,
                    {"masses_kg": ",".join(repr(m) for m in masses),
                     "files": ",".join(files)})
    print(f"wrote {len(files)} budgets to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qnamp",
        description="Quantum noise budgets for a squeezed-light "
                    "interferometer with an optomechanical amplifier")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed_default=None):
        p.add_argument("--config", help="run configuration file (INI)")
        p.add_argument("--preset", help="named preset: 15dB or 20dB")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=seed_default)

    p = sub.add_parser("budget", help="signal-referred noise budget CSV")
    common(p)
    p.add_argument("--no-amp", action="store_true",
                   help="disable the amplifier (and its output filter cavity)")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("gain", help="amplifier gain curve CSV")
    common(p)
    p.set_defaults(func=cmd_gain)

    p = sub.add_parser("optimize", help="optimize free design parameters")
    common(p)
    p.add_argument("--max-iter", type=int, default=120)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("coating", help="optimize the HR coating stack")
    p.add_argument("--pairs", type=int, default=12)
    p.add_argument("--t-max", type=float, default=5e-6)
    p.add_argument("--out", default=".")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_coating)

    p = sub.add_parser("mass-sweep", help="budgets across mirror masses")
    common(p)
    p.add_argument("--masses", default="3g,30g,300g",
                   help="comma list, e.g. 3g,30g,300g")
    p.add_argument("--no-optimize", action="store_true",
                   help="skip per-mass re-optimization")
    p.add_argument("--max-iter", type=int, default=60)
    p.set_defaults(func=cmd_mass_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
