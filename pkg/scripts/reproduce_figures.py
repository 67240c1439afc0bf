#!/usr/bin/env python3
"""Regenerate every CSV and figure for both design points.

Runs the engine CLI for the 15 dB and 20 dB configurations, the gain curve
and the mass sweep, then renders the full figure set with qnamp-plot.

Usage: python scripts/reproduce_figures.py [OUTDIR]
"""

import subprocess
import sys
from pathlib import Path


def run(*args):
    print("+", " ".join(args))
    subprocess.run(args, check=True)


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("figures_out")
    csv = out / "csv"
    fig = out / "fig"
    py = sys.executable

    run(py, "-m", "qnamp.cli", "budget", "--preset", "15dB",
        "--out", str(csv / "b15"))
    run(py, "-m", "qnamp.cli", "budget", "--preset", "15dB", "--no-amp",
        "--out", str(csv / "b15n"))
    run(py, "-m", "qnamp.cli", "budget", "--preset", "20dB",
        "--out", str(csv / "b20"))
    run(py, "-m", "qnamp.cli", "budget", "--preset", "20dB", "--no-amp",
        "--out", str(csv / "b20n"))
    run(py, "-m", "qnamp.cli", "gain", "--preset", "15dB",
        "--out", str(csv / "g15"))
    run(py, "-m", "qnamp.cli", "mass-sweep", "--preset", "15dB",
        "--masses", "3g,30g,300g", "--out", str(csv / "sweep"))
    run(py, "-m", "qnamp.cli", "coating", "--out", str(csv / "coating"))

    b15 = str(csv / "b15" / "budget.csv")
    b15n = str(csv / "b15n" / "budget.csv")
    run(py, "-m", "qnamp_plots.cli", "budget", "--in", b15,
        "--compare", b15n, "--out", str(fig), "--name", "total_15dB",
        "--title", "Total sensitivity, 15 dB injection")
    run(py, "-m", "qnamp_plots.cli", "budget", "--in", b15,
        "--subset", "amp", "--out", str(fig), "--name", "amp_budget_15dB",
        "--title", "Amplifier noise sources")
    run(py, "-m", "qnamp_plots.cli", "budget", "--in", b15,
        "--subset", "ifo", "--out", str(fig), "--name", "ifo_budget_15dB",
        "--title", "Interferometer noise sources")
    run(py, "-m", "qnamp_plots.cli", "gain",
        "--in", str(csv / "g15" / "gain.csv"), "--out", str(fig),
        "--name", "gain_15dB", "--title", "Amplifier gain")
    run(py, "-m", "qnamp_plots.cli", "mass-sweep",
        "--in", str(csv / "sweep" / "budget_3g.csv"),
        str(csv / "sweep" / "budget_30g.csv"),
        str(csv / "sweep" / "budget_300g.csv"),
        "--labels", "3 g,30 g,300 g", "--out", str(fig),
        "--name", "mass_sweep", "--title", "Mirror-mass sweep")
    run(py, "-m", "qnamp_plots.cli", "triptych",
        "--in", str(csv / "b20" / "budget.csv"),
        "--compare", str(csv / "b20n" / "budget.csv"),
        "--out", str(fig), "--name", "overview_20dB",
        "--title", "20 dB injection, 10 g mirrors")
    print(f"\nfigures in {fig}")


if __name__ == "__main__":
    main()
