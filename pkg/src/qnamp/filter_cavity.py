"""Detuned two-mirror filter cavities: sideband reflectivity and the
frequency-dependent quadrature rotation it produces on reflection.

Used for the input filter cavities (squeeze-angle rotation) and the output
filter cavity (readout-angle rotation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.constants as scc

from .grid import FrequencyGrid
from .twophoton import NoisePath, QuadratureTransfer


@dataclass(frozen=True)
class FilterCavityParams:
    """Two-mirror filter cavity, perfectly reflective end mirror.

    ``length_m`` is the one-way length; ``t_in_sq`` the input coupler power
    transmission; ``detuning_hz`` the offset of the cavity resonance from the
    carrier. Round-trip loss is lumped into the internal reflectivity.
    """

    length_m: float
    t_in_sq: float
    roundtrip_loss: float = 0.0
    detuning_hz: float = 0.0

    def __post_init__(self):
        if self.length_m <= 0:
            raise ValueError("cavity length must be > 0")
        if not 0 < self.t_in_sq < 1:
            raise ValueError("input coupler transmission must lie in (0, 1)")
        if self.roundtrip_loss < 0:
            raise ValueError("round-trip loss must be >= 0")

    @property
    def r_in(self) -> float:
        return float(np.sqrt(1.0 - self.t_in_sq))

    @property
    def r_rt(self) -> float:
        """Round-trip amplitude factor excluding the input coupler phase."""
        return self.r_in * float(np.sqrt(1.0 - self.roundtrip_loss))

    @property
    def half_bandwidth(self) -> float:
        """Cavity pole (rad/s): (1 - r_rt) / roundtrip time."""
        return (1.0 - self.r_rt) * scc.c / (2.0 * self.length_m)


def reflectivity(p: FilterCavityParams, omega_signed):
    """Amplitude reflectivity for a signed audio sideband frequency.

    r_fc = r_in - (t_in^2 / r_in) r_rt e^{i phi} / (1 - r_rt e^{i phi}) with
    the round-trip phase phi = (2L/c)(Omega - 2 pi detuning). Negative
    ``omega_signed`` selects the lower sideband.
    """
    om = np.asarray(omega_signed, dtype=float)
    phi = (2.0 * p.length_m / scc.c) * (om - 2.0 * np.pi * p.detuning_hz)
    e = np.exp(1j * phi)
    res = p.r_rt * e / (1.0 - p.r_rt * e)
    return p.r_in - (p.t_in_sq / p.r_in) * res


def quadrature_reflection(p: FilterCavityParams, grid: FrequencyGrid,
                          label="filter cavity") -> QuadratureTransfer:
    """Reflection in the quadrature basis from the two sideband reflectivities.

    With r+ = r_fc(+Omega) and r- = r_fc(-Omega):
        M = 1/2 [[r+ + r-*, i(r+ - r-*)], [-i(r+ - r-*), r+ + r-*]]
    For a lossless cavity this is a pure phase times a rotation.
    """
    rp = reflectivity(p, grid.omega)
    rmc = np.conj(reflectivity(p, -grid.omega))
    m = np.zeros((grid.n, 2, 2), dtype=complex)
    m[:, 0, 0] = 0.5 * (rp + rmc)
    m[:, 1, 1] = m[:, 0, 0]
    m[:, 0, 1] = 0.5j * (rp - rmc)
    m[:, 1, 0] = -m[:, 0, 1]
    return QuadratureTransfer(grid, m, label)


def reflection_loss_path(p: FilterCavityParams, grid: FrequencyGrid,
                         label="filter cavity loss") -> NoisePath | None:
    """Vacuum entering through the reflection deficit.

    Coupling is the Hermitian square root of I - M^dagger M per frequency,
    which restores vacuum normalization exactly. Returns None for a lossless
    cavity.
    """
    if p.roundtrip_loss == 0:
        return None
    m = quadrature_reflection(p, grid)
    deficit = np.broadcast_to(np.eye(2), (grid.n, 2, 2)) - m.dagger_product()
    w, v = np.linalg.eigh(deficit)
    w = np.clip(w, 0.0, None)
    coup = v @ (np.sqrt(w)[..., None] * np.conj(np.swapaxes(v, 1, 2)))
    return NoisePath(1.0, QuadratureTransfer.identity(grid), coup, label)


def rotation_angle(p: FilterCavityParams, grid: FrequencyGrid) -> np.ndarray:
    """Quadrature rotation delta(Omega) = (arg r+ + arg r-) / 2, unwrapped.

    Exact for a lossless cavity (where the reflection is a phase times a
    rotation by delta); with loss it is the rotation of the polar part.
    """
    ap = np.unwrap(np.angle(reflectivity(p, grid.omega)))
    am = np.unwrap(np.angle(reflectivity(p, -grid.omega)))
    return 0.5 * (ap + am)


def effective_readout_angle(ofc: FilterCavityParams | None,
                            grid: FrequencyGrid, zeta0=0.0) -> np.ndarray:
    """Homodyne angle realized before the OFC by measuring zeta0 after it.

    Reflecting off the cavity rotates the quadratures by delta(Omega), so a
    fixed post-cavity angle zeta0 measures the pre-cavity quadrature at
    zeta(Omega) = zeta0 - delta(Omega). Without an OFC this is just zeta0.
    """
    z0 = np.broadcast_to(np.asarray(zeta0, dtype=float), (grid.n,))
    if ofc is None:
        return z0.copy()
    return z0 - rotation_angle(ofc, grid)
