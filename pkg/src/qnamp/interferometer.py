"""Ponderomotive interferometer input-output relation, SQL normalization and
the squeezed-vacuum injection chain (squeezer -> injection loss -> input
filter cavities).

The effective interferometer model is the standard broadband scaling law
K = 8 P w0 / (M L^2 O^2 (g^2 + O^2)); arm power and bandwidth are free
configuration, with defaults chosen so the 15 dB design's input filter
cavity (500 m, 0.14% coupler, 33.4 Hz detuning) rotates the squeeze angle
onto the signal quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.constants as scc

from .filter_cavity import (
    FilterCavityParams,
    quadrature_reflection,
    reflection_loss_path,
)
from .grid import FrequencyGrid
from .twophoton import (
    NoisePath,
    QuadratureTransfer,
    SignalPath,
    compose,
    loss_channel,
    rotation,
    squeeze,
)


@dataclass(frozen=True)
class IfoParams:
    """Effective interferometer: losses plus the scaling-law model fields."""

    arm_loss: float = 20e-6          # per round trip
    src_loss: float = 300e-6         # per round trip
    readout_loss: float = 0.10       # applied after the OFC
    lambda_m: float = 2e-6
    mass_kg: float = 200.0
    arm_length_m: float = 4000.0
    arm_power_w: float = 3.0e6
    bandwidth_hz: float = 1400.0     # effective pole gamma_ifo / 2 pi

    def __post_init__(self):
        for name in ("arm_loss", "src_loss", "readout_loss"):
            v = getattr(self, name)
            if not 0 <= v < 1:
                raise ValueError(f"{name} must lie in [0, 1)")
        for name in ("lambda_m", "mass_kg", "arm_length_m", "bandwidth_hz"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.arm_power_w < 0:
            raise ValueError("arm power must be >= 0")

    @property
    def omega0(self) -> float:
        return 2.0 * np.pi * scc.c / self.lambda_m

    @property
    def gamma_ifo(self) -> float:
        return 2.0 * np.pi * self.bandwidth_hz

    @property
    def dark_port_loss(self) -> float:
        """Arm and SRC round-trip losses lumped at the dark port."""
        return self.arm_loss + self.src_loss


@dataclass(frozen=True)
class SqueezerParams:
    """Squeezed vacuum source and its injection path."""

    db: float = 15.0
    angle_rad: float = 0.0
    injection_loss: float = 0.01
    ifc_list: tuple = field(default_factory=tuple)  # FilterCavityParams, in order

    def __post_init__(self):
        if self.db < 0:
            raise ValueError("squeeze level must be >= 0 dB")
        if not 0 <= self.injection_loss < 1:
            raise ValueError("injection loss must lie in [0, 1)")


def kimble_factor(p: IfoParams, grid: FrequencyGrid):
    """(K_IFO, Phi_IFO, h_SQL) on the grid.

    K_IFO = 8 P w0 / (M L^2 O^2 (g^2 + O^2)),  Phi_IFO = arctan(O/g),
    h_SQL = sqrt(8 hbar / (M O^2 L^2)).
    """
    om = grid.omega
    if np.any(om == 0):
        raise ValueError("K_IFO is singular at Omega = 0")
    g = p.gamma_ifo
    k = 8.0 * p.arm_power_w * p.omega0 / (
        p.mass_kg * p.arm_length_m ** 2 * om ** 2 * (g ** 2 + om ** 2))
    phi = np.arctan(om / g)
    h_sql = np.sqrt(8.0 * scc.hbar / (p.mass_kg * om ** 2 * p.arm_length_m ** 2))
    return k, phi, h_sql


def ponderomotive_transfer(p: IfoParams, grid: FrequencyGrid) -> QuadratureTransfer:
    """Lossless IFO relation e^{2i Phi} [[1, -K], [0, 1]]: signal stays in b1."""
    k, phi, _ = kimble_factor(p, grid)
    m = np.zeros((grid.n, 2, 2), dtype=complex)
    m[:, 0, 0] = 1.0
    m[:, 1, 1] = 1.0
    m[:, 0, 1] = -k
    return QuadratureTransfer(grid, m * np.exp(2j * phi)[:, None, None], "ifo")


def signal_transfer(p: IfoParams, grid: FrequencyGrid) -> SignalPath:
    """Response to strain h: sqrt(2 K) e^{i Phi} (1, 0)^T / h_SQL."""
    k, phi, h_sql = kimble_factor(p, grid)
    t = np.zeros((grid.n, 2), dtype=complex)
    t[:, 0] = np.sqrt(2.0 * k) * np.exp(1j * phi) / h_sql
    return SignalPath(grid, t)


def ifo_io(p: IfoParams, grid: FrequencyGrid, paths, with_signal=False):
    """Propagate noise paths (and optionally add the signal) through the IFO.

    Applies the ponderomotive transfer, then the lumped dark-port loss to
    both the noise set and the signal.
    """
    pond = ponderomotive_transfer(p, grid)
    out = [q.through(pond) for q in paths]
    out = loss_channel(out, p.dark_port_loss, grid=grid, label="src/arm loss")
    if not with_signal:
        return out
    s = signal_transfer(p, grid).scaled(np.sqrt(1.0 - p.dark_port_loss))
    return out, s


def ideal_injection_rotation(p: IfoParams, grid: FrequencyGrid) -> QuadratureTransfer:
    """Test oracle: the exact rotation landing the squeeze on b_IFO,1.

    With the upper-triangular ponderomotive matrix the anti-squeezed
    quadrature cancels out of b1 for theta = -arctan(K_IFO).
    """
    k, _, _ = kimble_factor(p, grid)
    return rotation(grid, -np.arctan(k), "ideal ifc rotation")


def injection_chain(sq: SqueezerParams, grid: FrequencyGrid,
                    ideal_rotation: QuadratureTransfer | None = None):
    """Noise paths at the IFO input: squeezer, injection loss, IFC chain.

    The input filter cavities are applied by physical reflection in listed
    order (first cavity first as seen from the squeezer); each lossy cavity
    appends its own vacuum path. Passing ``ideal_rotation`` replaces the
    cavities with the ideal frequency-dependent rotation (test oracle only).
    """
    sqz = NoisePath(
        1.0,
        squeeze(grid, sq.db, sq.angle_rad, label="squeezed vacuum"),
        np.eye(2),
        label="quantum",
    )
    paths = loss_channel([sqz], sq.injection_loss, grid=grid,
                         label="injection loss")
    if ideal_rotation is not None:
        return [q.through(ideal_rotation) for q in paths]
    for i, fc in enumerate(sq.ifc_list):
        refl = quadrature_reflection(fc, grid, label=f"ifc{i + 1}")
        paths = [q.through(refl) for q in paths]
        lp = reflection_loss_path(fc, grid, label="ifc loss")
        if lp is not None:
            paths.append(lp)
    return paths


def caves_toy(r: float, eps: float, gain: float):
    """Closed-form lossy-readout noise with and without pre-amplification.

    Returns (S_h without amplifier, S_h with noise-free gain G):
    e^{-2r} + eps and e^{-2r} + eps/G^2. Used as the oracle for the full
    chain in the flat-gain configuration.
    """
    if not 0 <= eps < 1:
        raise ValueError("eps must lie in [0, 1)")
    if gain <= 0:
        raise ValueError("gain must be > 0")
    e2r = np.exp(-2.0 * r)
    return e2r + eps, e2r + eps / gain ** 2
