"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings.
"""

import subprocess
import sys
import time
from dataclasses import replace

import numpy as np
import pytest
import scipy.constants as scc

from qnamp.amplifier import (
    PumpParams,
    RingCavityParams,
    circulating_power_approx,
    circulating_power_exact,
    gain_magnitude,
    kappa_a,
    ring_io_approx,
    ring_io_exact,
    ring_k_a,
)
from qnamp.budget import budget, mass_sweep, preset
from qnamp.coating import (
    quarter_wave_stack,
    optimize_stack,
    stack_objective,
    stack_transmission,
)
from qnamp.filter_cavity import FilterCavityParams, quadrature_reflection
from qnamp.grid import FrequencyGrid
from qnamp.technical_noise import (
    BackscatterParams,
    RinModel,
    ScatterModel,
    SuspensionParams,
    backscatter_noise,
    loss_angle,
    scatter_loss,
    suspension_thermal,
)
from qnamp.twophoton import (
    NoisePath,
    QuadratureTransfer,
    SignalPath,
    homodyne,
    rotation,
    squeeze,
)


def report(name, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}: {name}"
    if detail:
        line += f"  [{detail}]"
    print(line)
    assert ok, line


def test_caves_oracle():
    """Full chain reproduces e^{-2r}+eps and e^{-2r}+eps/G^2 to 1e-10."""
    t0 = time.time()
    grid = FrequencyGrid(np.logspace(1, 3, 64))
    worst = 0.0
    for r in (0.5, 1.0, 1.7269):
        for eps in (0.01, 0.1, 0.3):
            for g in (1.0, 10.0, 100.0):
                db = 20 * r / np.log(10)
                sq = NoisePath(1.0, squeeze(grid, db), np.eye(2),
                               label="quantum")
                gain = QuadratureTransfer(
                    grid, np.array([[g, 0], [0, 1 / g]], dtype=complex))
                det = NoisePath(1.0, QuadratureTransfer.identity(grid),
                                np.sqrt(eps) * np.eye(2))
                sig = SignalPath(grid, np.tile([1.0 + 0j, 0.0], (grid.n, 1)))
                for amp_on in (False, True):
                    paths = [sq.through(gain) if amp_on else sq, det]
                    s = sig.through(gain) if amp_on else sig
                    psd, sgain = homodyne(0.0, paths, s)
                    s_h = psd / np.abs(sgain) ** 2
                    expect = np.exp(-2 * r) + (eps / g ** 2 if amp_on else eps)
                    worst = max(worst, np.max(np.abs(s_h / expect - 1)))
    dt = time.time() - t0
    report("caves oracle (3x3x3 grid, amp on/off)",
           worst < 1e-10 and dt < 1.0,
           f"worst rel err {worst:.2e}, {dt:.2f} s")


def test_unity_gain_frequency():
    """|K_A| = 1 at 1.5 kHz and 100 at 150 Hz, 3%, at the reference point."""
    t0 = time.time()
    ref = RingCavityParams(t_a=0.01, length_m=30.0, mass_kg=0.030)
    pump = PumpParams(p_source_w=200.0)
    g15 = gain_magnitude(ref, pump, 1500.0)
    g150 = gain_magnitude(ref, pump, 150.0)
    dt = time.time() - t0
    report("unity-gain frequency (reference point)",
           abs(g15 - 1) < 0.03 and abs(g150 / 100 - 1) < 0.03 and dt < 1.0,
           f"|K_A|(1.5 kHz)={g15:.4f}, |K_A|(150 Hz)={g150:.2f}, {dt:.2f} s")


def test_circulating_power():
    """Exact formula hits 40 kW at 1%/200 W; approx deviates < 0.6%."""
    p = RingCavityParams(t_a=0.01)
    pump = PumpParams(p_source_w=200.0)
    exact = circulating_power_exact(p, pump)
    approx = circulating_power_approx(p, pump)
    ok = abs(exact / 40e3 - 1) < 0.01 and abs(exact / approx - 1) < 0.006
    report("circulating power", ok,
           f"exact {exact:.1f} W, exact/approx-1 = {exact / approx - 1:.2e}")


def test_scatter_loss():
    val = scatter_loss(ScatterModel())
    report("scatter loss", abs(val / 2.3e-6 - 1) < 0.05,
           f"{val:.4g} vs 2.3e-6")


def test_backscatter():
    b = BackscatterParams(fraction=1e-7,
                          pump=PumpParams(p_source_w=200.0),
                          rin_model=RinModel(corner_hz=0.0))
    val = backscatter_noise(b, 100.0)
    report("backscatter quanta", abs(val / 7e-3 - 1) < 0.10,
           f"{val:.4g} quanta/rtHz per quadrature")


def test_exact_vs_approx_ring_io():
    p = RingCavityParams(t_a=0.0089, length_m=30.0, mass_kg=0.030)
    pump = PumpParams(p_source_w=220.0)
    grid = FrequencyGrid(np.logspace(1, 3, 500))
    k_ex = ring_k_a(p, pump, grid, exact=True)
    k_ap = ring_k_a(p, pump, grid, exact=False)
    dev = np.max(np.abs(k_ex / k_ap - 1))
    pc = circulating_power_exact(p, pump)
    kap = kappa_a(p, pump, pc, grid.omega)
    eta_ex = 0.5 * np.angle(ring_io_exact(p, grid, kap).matrices[:, 0, 0])
    eta_ap = 0.5 * np.angle(ring_io_approx(p, grid, kap).matrices[:, 0, 0])
    deta = np.degrees(np.max(np.abs(eta_ex - eta_ap)))
    report("exact vs approx ring IO", dev < 0.01 and deta < 0.5,
           f"max K_A dev {dev:.2e}, max eta dev {deta:.3f} deg")


def test_unitarity_suite():
    grid = FrequencyGrid.default()  # 1000 points
    p = RingCavityParams(t_a=0.0089, roundtrip_loss=0.0)
    pump = PumpParams(p_source_w=220.0)
    pc = circulating_power_exact(p, pump)
    kap = kappa_a(p, pump, pc, grid.omega)
    ring = ring_io_exact(p, grid, kap)
    worst_det = np.max(np.abs(np.abs(ring.det()) - 1))
    for m in (rotation(grid, 0.4), squeeze(grid, 15.0, 0.3)):
        worst_det = max(worst_det, np.max(np.abs(np.abs(m.det()) - 1)))
    fc = FilterCavityParams(40.0, 43e-6, 0.0, -80.4)
    mdm = quadrature_reflection(fc, grid).dagger_product()
    worst_unit = np.max(np.abs(mdm - np.eye(2)))
    report("unitarity suite (1000 points)",
           worst_det < 1e-10 and worst_unit < 1e-10,
           f"|det|-1 max {worst_det:.2e}, |M'M-I| max {worst_unit:.2e}")


def test_fdt_consistency():
    grid = FrequencyGrid.default()
    sus = SuspensionParams()
    x = suspension_thermal(sus, grid.f_hz)
    om = grid.omega
    om0 = sus.omega_pend
    phi = loss_angle(sus, grid.f_hz)
    chi = 1.0 / (sus.mass_kg * (om0 ** 2 * (1 + 1j * phi) - om ** 2))
    oracle = np.sqrt(4 * scc.k * sus.temperature_k
                     * np.abs(np.imag(chi)) / om)
    worst = np.max(np.abs(x / oracle - 1))
    report("FDT consistency", worst < 1e-10, f"max rel dev {worst:.2e}")


def test_coating_criteria():
    qw = quarter_wave_stack(n_pairs=12)
    r, t = stack_transmission(qw)
    energy_ok = abs(r + t - 1) < 1e-12
    best = optimize_stack(n_pairs=12, t_max=5e-6, seed=0, n_restarts=2,
                          max_iter=40)
    rb, tb = stack_transmission(best)
    ok = (t <= 5e-6 and tb <= 5e-6
          and stack_objective(best) <= stack_objective(qw)
          and energy_ok and abs(rb + tb - 1) < 1e-12)
    report("coating stack", ok,
           f"QW T={t:.3g}, optimized T={tb:.3g}, "
           f"objective {stack_objective(best):.4g} <= {stack_objective(qw):.4g}")


def test_qualitative_figure_reproduction():
    """Strict mid-band improvement, ring-loss dominance and mass ordering."""
    t0 = time.time()
    grid = FrequencyGrid(np.logspace(np.log10(5.0), 4, 400))
    cfg = preset("15dB", grid=grid)
    on = budget(cfg)
    off = budget(replace(cfg, amplifier_on=False))
    band = (grid.f_hz >= 50) & (grid.f_hz <= 500)
    improves = bool(np.all(on.total[band] < off.total[band]))
    ring = on.sources["ring_loss"][band]
    dominated = all(
        np.all(on.sources[k][band] < ring)
        for k in ("rin_residual", "coating_brownian", "suspension_thermal",
                  "ofc_loss"))
    sweep_grid = FrequencyGrid(
        np.logspace(np.log10(40.0), np.log10(600.0), 60))
    sweep_cfg = preset("15dB", grid=sweep_grid)
    off_s = budget(replace(sweep_cfg, amplifier_on=False))
    band_s = (sweep_grid.f_hz >= 50) & (sweep_grid.f_hz <= 500)
    results = mass_sweep(sweep_cfg, [0.003, 0.030, 0.300],
                         optimize_each=True, n_restarts=0, max_iter=30,
                         free_params={"amp.t_a": (0.004, 0.03),
                                      "zeta0_rad": (-0.1, 0.02)})
    imps = [float(np.mean(np.log(off_s.total[band_s] / b.total[band_s])))
            for _, b in results]
    ordered = imps[0] > imps[1] > imps[2]
    dt = time.time() - t0
    report("qualitative figure reproduction",
           improves and dominated and ordered and dt < 60.0,
           f"improve={improves}, ring-dominated={dominated}, "
           f"mass improvements={['%.3f' % i for i in imps]}, {dt:.1f} s")


def test_determinism(tmp_path):
    """Identical config+seed gives byte-identical CSVs across two runs."""
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        res = subprocess.run(
            [sys.executable, "-m", "qnamp.cli", "budget", "--preset", "15dB",
             "--seed", "11", "--out", str(out)],
            capture_output=True, text=True)
        assert res.returncode == 0, res.stderr
        outs.append((out / "budget.csv").read_bytes())
    report("determinism (byte-identical CSVs)", outs[0] == outs[1],
           f"{len(outs[0])} bytes")
