"""Triangular ring cavities and the Mach-Zehnder phase-sensitive amplifier.

The MZ amplifier splits signal + pump onto two triangular ring cavities and
recombines them, so for the symmetric configuration the single-ring
input-output relation is also the full amplifier relation. The forward
(co-propagating with the pump) direction amplifies the amplitude quadrature
into the phase quadrature through radiation pressure; the backward direction
is a plain phase shift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.constants as scc
from scipy.optimize import brentq

from .grid import FrequencyGrid
from .twophoton import NoisePath, QuadratureTransfer, compose


class SingularSusceptibilityError(ValueError):
    """Evaluation requested exactly at the pendulum resonance."""


@dataclass(frozen=True)
class PumpParams:
    """Amplifier pump: source power and carrier wavelength."""

    p_source_w: float = 220.0
    lambda0_m: float = 2e-6

    def __post_init__(self):
        if self.p_source_w < 0:
            raise ValueError("pump power must be >= 0")
        if self.lambda0_m <= 0:
            raise ValueError("carrier wavelength must be > 0")

    @property
    def omega0(self) -> float:
        """Carrier angular frequency 2 pi c / lambda0."""
        return 2.0 * np.pi * scc.c / self.lambda0_m


@dataclass(frozen=True)
class RingCavityParams:
    """One triangular ring cavity of the MZ amplifier.

    ``theta_inc_rad`` holds the three angles of incidence; the default is the
    equilateral configuration where all three are pi/6. ``l1_m`` is the
    M1-to-M2 segment, the remaining l2 = L_A - l1 closes the ring.
    """

    t_a: float = 0.0089            # M1 power transmissivity
    length_m: float = 30.0         # round-trip length L_A
    l1_m: float = 10.0
    mass_kg: float = 0.030
    pend_freq_hz: float = 1.0      # suspension resonance Omega0/2pi
    roundtrip_loss: float = 30e-6
    theta_inc_rad: tuple = (np.pi / 6, np.pi / 6, np.pi / 6)

    def __post_init__(self):
        if not 0 < self.t_a < 1:
            raise ValueError("T_A must lie in (0, 1)")
        if self.length_m <= 0 or self.mass_kg <= 0:
            raise ValueError("length and mass must be > 0")
        if not 0 <= self.l1_m <= self.length_m:
            raise ValueError("l1 must lie in [0, L_A]")
        if self.roundtrip_loss < 0:
            raise ValueError("round-trip loss must be >= 0")
        if len(self.theta_inc_rad) != 3:
            raise ValueError("need three angles of incidence")

    @property
    def r_a(self) -> float:
        return float(np.sqrt(1.0 - self.t_a))

    @property
    def omega_pend(self) -> float:
        return 2.0 * np.pi * self.pend_freq_hz

    @property
    def gamma_a(self) -> float:
        """Cavity pole c T_A / (2 L_A) in rad/s."""
        return scc.c * self.t_a / (2.0 * self.length_m)


def susceptibility(p: RingCavityParams, omega):
    """Lossless pendulum susceptibility chi = 1 / (m (Omega0^2 - Omega^2))."""
    om = np.asarray(omega, dtype=float)
    if np.any(om < 0):
        raise ValueError("Omega must be >= 0")
    om0 = p.omega_pend
    if np.any(om == om0):
        raise SingularSusceptibilityError(
            f"susceptibility singular at the pendulum resonance "
            f"{p.pend_freq_hz} Hz")
    return 1.0 / (p.mass_kg * (om0 ** 2 - om ** 2))


def circulating_power_exact(p: RingCavityParams, pump: PumpParams) -> float:
    """P_circ = (1/2) (t_A / (1 - r_A))^2 P_source per ring.

    The 1/2 accounts for the 50/50 split of the source between the rings.
    """
    t = np.sqrt(p.t_a)
    return 0.5 * (t / (1.0 - p.r_a)) ** 2 * pump.p_source_w


def circulating_power_approx(p: RingCavityParams, pump: PumpParams) -> float:
    """Leading order in T_A: P_circ = 2 P_source / T_A."""
    return 2.0 * pump.p_source_w / p.t_a


def kappa_a(p: RingCavityParams, pump: PumpParams, p_circ, omega):
    """Optomechanical coupling strength of one ring.

    General three-mirror form, kappa = -(8 w0 Pc / c^2) sum_i cos^2(th_i) chi_i,
    with equal susceptibilities; reduces to -18 w0 Pc chi / c^2 for the
    equilateral ring.
    """
    chi = susceptibility(p, omega)
    wsum = sum(np.cos(th) ** 2 for th in p.theta_inc_rad)
    return -(8.0 * pump.omega0 * p_circ / scc.c ** 2) * wsum * chi


def _triangular(grid, k_a, phase):
    m = np.zeros((grid.n, 2, 2), dtype=complex)
    m[:, 0, 0] = 1.0
    m[:, 1, 1] = 1.0
    m[:, 1, 0] = -np.broadcast_to(k_a, (grid.n,))
    return QuadratureTransfer(grid, m * phase[:, None, None], "ring")


def ring_io_exact(p: RingCavityParams, grid: FrequencyGrid, kappa) -> QuadratureTransfer:
    """Exact lossless ring input-output relation e^{2i eta} [[1,0],[-K_A,1]].

    e^{2i eta} = (e^{i Omega L/c} - r_A) / (1 - e^{i Omega L/c} r_A) and
    K_A = t_A^2 kappa / (1 - 2 cos(Omega L/c) r_A + r_A^2). Assumes the pump
    is resonant (no cavity detuning).
    """
    om = grid.omega
    phi = om * p.length_m / scc.c
    e = np.exp(1j * phi)
    r = p.r_a
    phase = (e - r) / (1.0 - e * r)
    k_a = p.t_a * np.broadcast_to(kappa, (grid.n,)) / (
        1.0 - 2.0 * np.cos(phi) * r + r ** 2)
    return _triangular(grid, k_a, phase)


def ring_io_approx(p: RingCavityParams, grid: FrequencyGrid, kappa) -> QuadratureTransfer:
    """Single-pole approximation, valid for Omega L/c << 1 and T_A << 1.

    K_A = 4 kappa / (T_A (1 + (Omega/gamma_A)^2)), eta = arctan(Omega/gamma_A).
    """
    om = grid.omega
    eta = np.arctan(om / p.gamma_a)
    phase = np.exp(2j * eta)
    k_a = 4.0 * np.broadcast_to(kappa, (grid.n,)) / (
        p.t_a * (1.0 + (om / p.gamma_a) ** 2))
    return _triangular(grid, k_a, phase)


def ring_k_a(p: RingCavityParams, pump: PumpParams, grid: FrequencyGrid,
             exact=True) -> np.ndarray:
    """Signed optomechanical gain K_A(Omega) of one ring."""
    pc = circulating_power_exact(p, pump)
    kap = kappa_a(p, pump, pc, grid.omega)
    io = ring_io_exact(p, grid, kap) if exact else ring_io_approx(p, grid, kap)
    # K_A sits in the (2,1) slot, -K_A e^{2i eta}; strip the phase
    m = io.matrices
    return np.real(-m[:, 1, 0] / m[:, 0, 0])


def gain_magnitude(p: RingCavityParams, pump: PumpParams, f_hz):
    """Scaling-law gain magnitude.

    |K_A| = (0.01/T_A)(30 g/m_A)(P_circ/40 kW)(1.5 kHz/f)^2, valid well above
    the pendulum resonance and well below the cavity pole.
    """
    pc = circulating_power_exact(p, pump)
    f = np.asarray(f_hz, dtype=float)
    return (0.01 / p.t_a) * (0.030 / p.mass_kg) * (pc / 40e3) * (1500.0 / f) ** 2


def ring_input_loss(p: RingCavityParams, grid: FrequencyGrid) -> np.ndarray:
    """Effective input-referred power loss of the lossy (passive) ring.

    eps(Omega) = 1 - |r_lossy|^2 with the round-trip loss folded into the
    cavity buildup; at DC this is about 4 Lrt / T_A.
    """
    if p.roundtrip_loss == 0:
        return np.zeros(grid.n)
    om = grid.omega
    e = np.exp(1j * om * p.length_m / scc.c)
    srt = np.sqrt(1.0 - p.roundtrip_loss)
    r = p.r_a
    r_lossy = (srt * e - r) / (1.0 - r * srt * e)
    return np.clip(1.0 - np.abs(r_lossy) ** 2, 0.0, 1.0 - 1e-15)


def displacement_coupling(p: RingCavityParams, pump: PumpParams) -> float:
    """Quanta per (m/rtHz) coupling of mirror motion into the phase quadrature.

    sqrt(32 w0 P_circ / (hbar c^2 T_A)): cavity-built-up phase modulation of
    the circulating pump, referred to the amplifier output.
    """
    pc = circulating_power_exact(p, pump)
    return float(np.sqrt(32.0 * pump.omega0 * pc / (scc.hbar * scc.c ** 2 * p.t_a)))


@dataclass(frozen=True)
class AmplifierIO:
    """Forward input-output relation of the MZ amplifier.

    ``transfer`` acts on the incident quadratures. ``input_loss`` is the
    power-loss fraction to apply to everything entering the rings (the loss
    vacuum then rides through ``transfer``, i.e. it is amplified).
    ``displacement_path`` carries non-radiation-pressure mirror motion into
    the phase quadrature at the output.
    """

    transfer: QuadratureTransfer
    input_loss: np.ndarray = field(repr=False)
    displacement_path: NoisePath | None


def mz_forward(p: RingCavityParams, pump: PumpParams, grid: FrequencyGrid,
               xi_asd=None, exact=True) -> AmplifierIO:
    """Forward MZ relation: amplified signal transfer plus noise terms.

    The round-trip loss vacuum is injected inside the cavity, before
    amplification, by exposing an input-referred loss fraction; the budget
    applies it with :func:`qnamp.twophoton.loss_channel` ahead of the ring
    transfer so the loss vacuum is amplified along with the signal.

    ``xi_asd``: displacement ASD (m/rtHz) of mirror motion not caused by
    radiation pressure; it couples into the phase quadrature at the output.
    """
    pc = circulating_power_exact(p, pump)
    kap = kappa_a(p, pump, pc, grid.omega)
    io = ring_io_exact(p, grid, kap) if exact else ring_io_approx(p, grid, kap)
    eps = ring_input_loss(p, grid)
    disp = None
    if xi_asd is not None:
        xi = np.broadcast_to(np.asarray(xi_asd, dtype=float), (grid.n,))
        coup = np.zeros((grid.n, 2), dtype=complex)
        coup[:, 1] = displacement_coupling(p, pump) * xi
        disp = NoisePath(1.0, QuadratureTransfer.identity(grid), coup,
                         label="displacement")
    return AmplifierIO(io, eps, disp)


def mz_backward(p: RingCavityParams, grid: FrequencyGrid) -> QuadratureTransfer:
    """Counter-propagating relation: pure phase e^{2i eta} times identity."""
    om = grid.omega
    e = np.exp(1j * om * p.length_m / scc.c)
    phase = (e - p.r_a) / (1.0 - e * p.r_a)
    m = np.broadcast_to(np.eye(2), (grid.n, 2, 2)) * phase[:, None, None]
    return QuadratureTransfer(grid, m, "mz backward")


def cmrr_split(p: RingCavityParams, pump: PumpParams, cmrr_db=60.0,
               f_ref_hz=100.0):
    """Split T_A so the matched pair realizes the requested rejection.

    Returns (p_left, p_right) differing only in T_A such that the broadband
    residual |K_left - K_right| / 2 is 10^(-cmrr_db/20) of the single-ring
    |K_A| at the reference frequency.
    """
    target = 10.0 ** (-cmrr_db / 20.0)
    grid = FrequencyGrid(np.array([f_ref_hz]))

    def pair(delta):
        left = RingCavityParams(**{**_params_dict(p), "t_a": p.t_a * (1 + delta / 2)})
        right = RingCavityParams(**{**_params_dict(p), "t_a": p.t_a * (1 - delta / 2)})
        return left, right

    def resid(delta):
        left, right = pair(delta)
        kl = ring_k_a(left, pump, grid)[0]
        kr = ring_k_a(right, pump, grid)[0]
        k0 = ring_k_a(p, pump, grid)[0]
        return 0.5 * abs(kl - kr) / abs(k0) - target

    # d ln K / d ln T ~ -2 below the cavity pole, so delta ~ target
    delta = brentq(resid, target / 10.0, target * 10.0, xtol=1e-12)
    return pair(delta)


def _params_dict(p: RingCavityParams) -> dict:
    return {
        "t_a": p.t_a, "length_m": p.length_m, "l1_m": p.l1_m,
        "mass_kg": p.mass_kg, "pend_freq_hz": p.pend_freq_hz,
        "roundtrip_loss": p.roundtrip_loss, "theta_inc_rad": p.theta_inc_rad,
    }


def cmrr_residual(p_left: RingCavityParams, p_right: RingCavityParams,
                  pump: PumpParams, common_input: NoisePath) -> NoisePath:
    """Residual transfer of a common-mode input through the imbalanced pair.

    The MZ difference port sees (M_left - M_right) / 2 of anything driving
    both rings coherently.
    """
    grid = common_input.transfer.grid
    half = QuadratureTransfer(
        grid,
        0.5 * (_ring_transfer(p_left, pump, grid).matrices
               - _ring_transfer(p_right, pump, grid).matrices),
        "cmrr residual")
    return common_input.through(half)


def cmrr_residual_ratio(p_left: RingCavityParams, p_right: RingCavityParams,
                        pump: PumpParams, grid: FrequencyGrid) -> np.ndarray:
    """|K_left - K_right| / (2 |K_mean|): amplitude rejection vs frequency."""
    kl = ring_k_a(p_left, pump, grid)
    kr = ring_k_a(p_right, pump, grid)
    return np.abs(kl - kr) / (2.0 * np.abs(0.5 * (kl + kr)))


def _ring_transfer(p, pump, grid):
    pc = circulating_power_exact(p, pump)
    kap = kappa_a(p, pump, pc, grid.omega)
    return ring_io_exact(p, grid, kap)
