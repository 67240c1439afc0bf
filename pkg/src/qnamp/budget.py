"""Full-chain assembly and noise budgets.

Chain order: squeezer -> injection loss -> input filter cavities ->
(backward pass through the amplifier) -> interferometer -> dark-port loss ->
ring input loss -> amplifier -> displacement noises -> output filter cavity
-> additive detection loss -> homodyne at the OFC-rotated readout angle.

Detection loss is additive (b_out -> b_out + sqrt(L) n), matching the source
model for the readout chain; all intra-chain losses are energy conserving.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from .amplifier import (
    PumpParams,
    RingCavityParams,
    cmrr_residual_ratio,
    cmrr_split,
    circulating_power_exact,
    displacement_coupling,
    mz_backward,
    mz_forward,
    ring_k_a,
)
from .coating import CoatingStack, brownian_proxy, quarter_wave_stack
from .filter_cavity import (
    FilterCavityParams,
    effective_readout_angle,
    quadrature_reflection,
    reflection_loss_path,
)
from .grid import FrequencyGrid
from .interferometer import IfoParams, SqueezerParams, ifo_io, injection_chain, signal_transfer
from .technical_noise import (
    RinModel,
    SuspensionParams,
    coating_brownian,
    rin_displacement,
    suspension_thermal,
)
from .twophoton import (
    NoisePath,
    QuadratureTransfer,
    homodyne,
    loss_channel,
    signal_referred,
)

SOURCE_LABELS = (
    "quantum",
    "injection_loss",
    "ifc_loss",
    "src_arm_loss",
    "ring_loss",
    "rin_residual",
    "coating_brownian",
    "suspension_thermal",
    "ofc_loss",
    "readout_loss",
)


@dataclass(frozen=True)
class ChainConfig:
    """Everything needed to evaluate the readout chain."""

    grid: FrequencyGrid
    ifo: IfoParams = IfoParams()
    squeezer: SqueezerParams = SqueezerParams()
    amp: RingCavityParams = RingCavityParams()
    pump: PumpParams = PumpParams()
    ofc: FilterCavityParams | None = None
    suspension: SuspensionParams = SuspensionParams()
    coating: CoatingStack = field(default_factory=quarter_wave_stack)
    rin_model: RinModel = RinModel()
    beam_radius_m: float = 5e-3
    temperature_k: float = 123.0
    zeta0_rad: float = 0.0
    cmrr_db: float = 60.0
    cmrr_ref_hz: float = 100.0
    amplifier_on: bool = True
    exact_io: bool = True
    seed: int = 0


@dataclass(frozen=True)
class StrainBudget:
    """Per-source and total signal-referred amplitude spectral densities."""

    grid: FrequencyGrid
    sources: dict
    total: np.ndarray

    def check_quadrature_sum(self, rtol=1e-10) -> bool:
        ssq = np.zeros(self.grid.n)
        for asd in self.sources.values():
            ssq += asd ** 2
        return bool(np.allclose(ssq, self.total ** 2, rtol=rtol, atol=0.0))


def _detection_path(grid, loss, label="readout_loss"):
    """Additive readout-loss vacuum: b_out -> b_out + sqrt(L) n."""
    coup = np.sqrt(loss) * np.eye(2)
    return NoisePath(1.0, QuadratureTransfer.identity(grid), coup, label)


def _displacement_xi(c: ChainConfig):
    """Effective single-mirror displacement ASDs feeding the xi channel."""
    f = c.grid.f_hz
    p_circ = circulating_power_exact(c.amp, c.pump)
    xi_sus = suspension_thermal(c.suspension, f)
    d_eff, phi_eff = brownian_proxy(c.coating)
    xi_coat = coating_brownian(d_eff, phi_eff, c.beam_radius_m,
                               c.temperature_k, f)
    xi_common = rin_displacement(c.amp, c.pump, p_circ, c.rin_model, f)
    if p_circ > 0:
        left, right = cmrr_split(c.amp, c.pump, c.cmrr_db, c.cmrr_ref_hz)
        rejection = cmrr_residual_ratio(left, right, c.pump, c.grid)
    else:
        rejection = np.zeros(c.grid.n)
    xi_rin = xi_common * rejection
    return xi_sus, xi_coat, xi_rin


def assemble(c: ChainConfig):
    """Build the noise-path set, signal path and readout angle for a config.

    Returns (paths, sig, zeta) ready for :func:`qnamp.twophoton.homodyne`.
    """
    grid = c.grid
    paths = injection_chain(c.squeezer, grid)
    if c.amplifier_on:
        back = mz_backward(c.amp, grid)
        paths = [q.through(back) for q in paths]
    paths, sig = ifo_io(c.ifo, grid, paths, with_signal=True)
    if c.amplifier_on:
        amp_io = mz_forward(c.amp, c.pump, grid, exact=c.exact_io)
        paths = loss_channel(paths, amp_io.input_loss, grid=grid,
                             label="ring_loss")
        sig = sig.scaled(np.sqrt(1.0 - amp_io.input_loss))
        paths = [q.through(amp_io.transfer) for q in paths]
        sig = sig.through(amp_io.transfer)
        coupling = displacement_coupling(c.amp, c.pump)
        xi_sus, xi_coat, xi_rin = _displacement_xi(c)
        for xi, label in ((xi_sus, "suspension_thermal"),
                          (xi_coat, "coating_brownian"),
                          (xi_rin, "rin_residual")):
            coup = np.zeros((grid.n, 2), dtype=complex)
            coup[:, 1] = coupling * xi
            paths.append(NoisePath(1.0, QuadratureTransfer.identity(grid),
                                   coup, label))
        if c.ofc is not None:
            refl = quadrature_reflection(c.ofc, grid, label="ofc")
            paths = [q.through(refl) for q in paths]
            sig = sig.through(refl)
            lp = reflection_loss_path(c.ofc, grid, label="ofc_loss")
            if lp is not None:
                paths.append(lp)
    paths.append(_detection_path(grid, c.ifo.readout_loss))
    zeta = effective_readout_angle(c.ofc if c.amplifier_on else None,
                                   grid, c.zeta0_rad)
    return paths, sig, zeta


_LABEL_MAP = {
    "quantum": "quantum",
    "injection loss": "injection_loss",
    "ifc loss": "ifc_loss",
    "src/arm loss": "src_arm_loss",
    "ring_loss": "ring_loss",
    "suspension_thermal": "suspension_thermal",
    "coating_brownian": "coating_brownian",
    "rin_residual": "rin_residual",
    "ofc_loss": "ofc_loss",
    "readout_loss": "readout_loss",
}


def budget(c: ChainConfig) -> StrainBudget:
    """Signal-referred budget with one ASD curve per labeled source."""
    paths, sig, zeta = assemble(c)
    _, gain = homodyne(zeta, [], sig)
    psd_by_label = {label: np.zeros(c.grid.n) for label in SOURCE_LABELS}
    for p in paths:
        label = _LABEL_MAP.get(p.label)
        if label is None:
            raise KeyError(f"unlabeled noise path {p.label!r}")
        psd_by_label[label] += homodyne(zeta, [p])
    sources = {label: signal_referred(psd, gain)
               for label, psd in psd_by_label.items()}
    total_psd = sum(psd_by_label.values())
    total = signal_referred(total_psd, gain)
    return StrainBudget(c.grid, sources, total)


def reference_gain(grid: FrequencyGrid) -> np.ndarray:
    """Lossless fixed-quadrature gain at the characteristic design point.

    |K_A| for a 1% coupler, 30 m ring, 30 g mirrors and 200 W source (about
    40 kW circulating): the scaling-law reference with unity gain near
    1.5 kHz, independent of the configured amplifier.
    """
    ref = RingCavityParams(t_a=0.01, length_m=30.0, mass_kg=0.030)
    return np.abs(ring_k_a(ref, PumpParams(p_source_w=200.0), grid))


def gain_curve(c: ChainConfig):
    """Effective signal amplification in the frequency-dependent readout.

    Ratio of the homodyned signal transfer of the full chain (amplifier,
    OFC, their losses) to the bare-chain transfer measured at zeta = 0.
    Returns (gain_readout, gain_reference).
    """
    _, sig, zeta = assemble(c)
    _, gain_amp = homodyne(zeta, [], sig)
    bare = signal_transfer(c.ifo, c.grid).scaled(
        np.sqrt(1.0 - c.ifo.dark_port_loss))
    _, gain_bare = homodyne(0.0, [], bare)
    return np.abs(gain_amp) / np.abs(gain_bare), reference_gain(c.grid)


# ---------------------------------------------------------------------------
# parameter optimization

#: dotted-path -> (getter, setter) for the optimizer's free parameters
def _get_param(c: ChainConfig, path: str) -> float:
    obj = c
    parts = path.split(".")
    for name in parts[:-1]:
        obj = getattr(obj, name)
    return float(getattr(obj, parts[-1]))


def _set_param(c: ChainConfig, path: str, value: float) -> ChainConfig:
    parts = path.split(".")
    if len(parts) == 1:
        return replace(c, **{parts[0]: value})
    if len(parts) == 2:
        sub = getattr(c, parts[0])
        return replace(c, **{parts[0]: replace(sub, **{parts[1]: value})})
    raise ValueError(f"unsupported parameter path {path!r}")


DEFAULT_FREE_PARAMS = {
    "amp.t_a": (0.002, 0.05),
    "pump.p_source_w": (20.0, 500.0),
    "ofc.detuning_hz": (-300.0, -10.0),
    "zeta0_rad": (-0.3, 0.3),
}

COST_BAND_HZ = (50.0, 500.0)


def midband_cost(c: ChainConfig, n_points=24) -> float:
    """Mean log total ASD over log-spaced points in the 50-500 Hz band."""
    coarse = replace(c, grid=FrequencyGrid(
        np.logspace(np.log10(COST_BAND_HZ[0]), np.log10(COST_BAND_HZ[1]),
                    n_points)))
    b = budget(coarse)
    if not np.all(np.isfinite(b.total)):
        return np.inf
    return float(np.mean(np.log(b.total)))


class InfeasibleBoundsError(ValueError):
    pass


def optimize(c: ChainConfig, free_params=None, seed=None, n_restarts=2,
             max_iter=120):
    """Minimize the mid-band cost over the listed free parameters.

    Bounded Nelder-Mead direct search, deterministic for a fixed seed:
    one start at the incoming configuration plus seeded random restarts
    inside the bounds. Returns (best config, info dict).
    """
    free = dict(free_params) if free_params is not None else dict(DEFAULT_FREE_PARAMS)
    if c.ofc is None:
        free.pop("ofc.detuning_hz", None)
    names = sorted(free)
    lo = np.array([free[k][0] for k in names])
    hi = np.array([free[k][1] for k in names])
    if np.any(hi <= lo):
        raise InfeasibleBoundsError("each bound pair must satisfy lo < hi")
    x0 = np.array([_get_param(c, k) for k in names])
    x0 = np.clip(x0, lo, hi)
    rng = np.random.default_rng(c.seed if seed is None else seed)

    def build(x):
        out = c
        for name, v in zip(names, x):
            out = _set_param(out, name, float(v))
        return out

    def cost(x):
        return midband_cost(build(np.clip(x, lo, hi)))

    starts = [x0] + [lo + (hi - lo) * rng.uniform(0.15, 0.85, size=len(names))
                     for _ in range(n_restarts)]
    best_x, best_cost = x0, cost(x0)
    for start in starts:
        res = minimize(cost, start, method="Nelder-Mead",
                       bounds=list(zip(lo, hi)),
                       options={"maxiter": max_iter, "xatol": 1e-4,
                                "fatol": 1e-6, "disp": False})
        if res.fun < best_cost:
            best_x, best_cost = np.clip(res.x, lo, hi), res.fun
    best = build(best_x)
    info = {"cost": float(best_cost),
            "params": {k: float(v) for k, v in zip(names, best_x)},
            "start_cost": float(cost(x0))}
    return best, info


def _max_workers(n_tasks: int) -> int:
    cap = os.environ.get("QNAMP_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(n_tasks, limit))


def mass_sweep(c: ChainConfig, masses_kg, optimize_each=True, **opt_kwargs):
    """Budget for each amplifier mirror mass, re-optimizing the free design
    parameters per mass. Entries run in parallel subject to QNAMP_THREADS."""
    masses = [float(m) for m in masses_kg]
    if any(m <= 0 for m in masses):
        raise ValueError("masses must be > 0")

    def one(mass):
        cm = replace(c, amp=replace(c.amp, mass_kg=mass),
                     suspension=replace(c.suspension, mass_kg=mass))
        if optimize_each:
            cm, _ = optimize(cm, **opt_kwargs)
        return cm, budget(cm)

    with ThreadPoolExecutor(max_workers=_max_workers(len(masses))) as pool:
        return list(pool.map(one, masses))


# ---------------------------------------------------------------------------
# named design points

def preset(name: str, grid: FrequencyGrid | None = None) -> ChainConfig:
    """Named design configurations.

    "15dB": single input filter cavity; "20dB": two input filter cavities in
    series and 10 g amplifier mirrors. Input-filter-cavity detunings are
    stored with the sign required by the adopted round-trip phase convention
    (opposite to the output filter cavity's).
    """
    if grid is None:
        grid = FrequencyGrid.default()
    common = dict(
        grid=grid,
        ifo=IfoParams(),
        rin_model=RinModel(),
        beam_radius_m=5e-3,
        temperature_k=123.0,
        zeta0_rad=-0.0175,
        cmrr_db=60.0,
    )
    if name == "15dB":
        return ChainConfig(
            squeezer=SqueezerParams(
                db=15.0, injection_loss=0.01,
                ifc_list=(FilterCavityParams(500.0, 0.0014, 20e-6, +33.4),)),
            amp=RingCavityParams(t_a=0.0089, length_m=30.0, mass_kg=0.030,
                                 roundtrip_loss=30e-6),
            pump=PumpParams(p_source_w=220.0),
            ofc=FilterCavityParams(40.0, 43e-6, 20e-6, -80.4),
            suspension=SuspensionParams(mass_kg=0.030),
            coating=quarter_wave_stack(n_pairs=12),
            **common,
        )
    if name == "20dB":
        cfg = ChainConfig(
            squeezer=SqueezerParams(
                db=20.0, injection_loss=0.003,
                ifc_list=(FilterCavityParams(800.0, 0.0022, 10e-6, +34.6),
                          FilterCavityParams(800.0, 0.0022, 10e-6, -4.96))),
            amp=RingCavityParams(t_a=0.0090, length_m=30.0, mass_kg=0.010,
                                 roundtrip_loss=15e-6),
            pump=PumpParams(p_source_w=230.0),
            ofc=FilterCavityParams(25.0, 22e-6, 10e-6, -77.8),
            suspension=SuspensionParams(mass_kg=0.010),
            coating=quarter_wave_stack(n_pairs=12),
            **common,
        )
        return replace(cfg, ifo=replace(cfg.ifo, src_loss=100e-6))
    raise KeyError(f"unknown preset {name!r} (expected '15dB' or '20dB')")
