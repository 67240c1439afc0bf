"""Renderers for the five figure types: budget comparison, sub-budgets,
gain curve, mass sweep and the three-panel overview.

Outputs are deterministic: fixed style, no timestamps in the image files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .tables import BudgetTable, GainTable

plt.rcParams["svg.hashsalt"] = "qnamp-plots"

# amplifier-side sources (the Fig-3-style sub-budget) and IFO-side sources
AMP_SOURCES = ("ring_loss", "rin_residual", "coating_brownian",
               "suspension_thermal", "ofc_loss")
IFO_SOURCES = ("quantum", "injection_loss", "ifc_loss", "src_arm_loss",
               "readout_loss")

_LABELS = {
    "quantum": "quantum vacuum",
    "injection_loss": "injection loss",
    "ifc_loss": "IFC loss",
    "src_arm_loss": "SRC/arm loss",
    "ring_loss": "ring cavity loss",
    "rin_residual": "pump RIN residual",
    "coating_brownian": "coating Brownian",
    "suspension_thermal": "suspension thermal",
    "ofc_loss": "OFC loss",
    "readout_loss": "readout loss",
}

_METADATA = {"Date": None}


def _save(fig, out_base) -> list[str]:
    out_base = Path(out_base)
    out_base.parent.mkdir(parents=True, exist_ok=True)
    written = []
    for ext in ("png", "svg"):
        target = out_base.with_suffix(f".{ext}")
        fig.savefig(target, metadata=_METADATA, dpi=150)
        written.append(str(target))
    plt.close(fig)
    return written


def _style_axes(ax, ylabel=r"strain ASD [1/$\sqrt{\mathrm{Hz}}$]"):
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)


def _plot_budget_axes(ax, table: BudgetTable, sources=None, total_style="-"):
    names = list(sources) if sources is not None else table.source_names()
    curves = table.require(names)
    for name, asd in zip(names, curves):
        live = asd > 0
        if live.any():
            ax.plot(table.f_hz[live], asd[live], lw=1.0, alpha=0.8,
                    label=_LABELS.get(name, name))
    ax.plot(table.f_hz, table.total, total_style, color="black", lw=2.0,
            label="total")


def render_budget(csv_path, out_base, compare_csv=None, sources=None,
                  title=None):
    """Per-source budget figure; overlays a second total when given.

    ``compare_csv`` draws the second file's total dashed (amplifier-off
    reference). ``sources`` restricts the drawn source curves by name.
    """
    table = BudgetTable.load(csv_path)
    fig, ax = plt.subplots(figsize=(7, 5))
    _plot_budget_axes(ax, table, sources=sources)
    if compare_csv is not None:
        other = BudgetTable.load(compare_csv)
        ax.plot(other.f_hz, other.total, "--", color="gray", lw=2.0,
                label="total (no amplifier)")
    _style_axes(ax)
    ax.legend(fontsize=8, ncol=2)
    if title:
        ax.set_title(title)
    return _save(fig, out_base)


def render_gain(csv_path, out_base, title=None):
    """Gain curve with a unity guide line and its crossing annotated.

    Returns (written files, unity crossing of the reference curve in Hz).
    """
    table = GainTable.load(csv_path)
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.plot(table.f_hz, table.gain_readout, lw=1.8,
            label="frequency-dependent readout")
    ax.plot(table.f_hz, table.gain_reference, "--", lw=1.4,
            label="lossless fixed-quadrature reference")
    ax.axhline(1.0, color="gray", lw=0.8)
    crossing = table.unity_crossing_hz()
    ax.axvline(crossing, color="gray", lw=0.8, ls=":")
    ax.annotate(f"unity gain\n{crossing:.0f} Hz", (crossing, 1.0),
                textcoords="offset points", xytext=(8, 12), fontsize=8)
    _style_axes(ax, ylabel="signal gain")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    files = _save(fig, out_base)
    return files, crossing


def render_mass_sweep(csv_paths, labels, out_base, title=None):
    """Overlaid totals for several mirror masses."""
    if not csv_paths:
        raise ValueError("no input CSVs")
    fig, ax = plt.subplots(figsize=(7, 5))
    for path, label in zip(csv_paths, labels):
        table = BudgetTable.load(path)
        ax.plot(table.f_hz, table.total, lw=1.6, label=label)
    _style_axes(ax)
    ax.legend(fontsize=9)
    if title:
        ax.set_title(title)
    return _save(fig, out_base)


def render_triptych(csv_path, compare_csv, out_base, title=None):
    """Three stacked panels: total comparison, amplifier and IFO sub-budgets."""
    table = BudgetTable.load(csv_path)
    other = BudgetTable.load(compare_csv)
    fig, axes = plt.subplots(3, 1, figsize=(7, 13))
    axes[0].plot(table.f_hz, table.total, "-", color="black", lw=2.0,
                 label="total (with amplifier)")
    axes[0].plot(other.f_hz, other.total, "--", color="gray", lw=2.0,
                 label="total (no amplifier)")
    _plot_budget_axes(axes[1], table, sources=AMP_SOURCES)
    _plot_budget_axes(axes[2], table, sources=IFO_SOURCES)
    for ax in axes:
        _style_axes(ax)
        ax.legend(fontsize=7, ncol=2)
    if title:
        axes[0].set_title(title)
    fig.tight_layout()
    return _save(fig, out_base)
