"""Classical noise models: micro-roughness scatter loss, pump intensity
noise, counter-propagating backscatter, coating Brownian motion and
suspension thermal motion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.constants as scc

from .amplifier import PumpParams, RingCavityParams, susceptibility


@dataclass(frozen=True)
class ScatterModel:
    """Empirical micro-roughness scatter model.

    PSD(f_s) = A (f_s mm)^(-gamma) above the cutoff f_s = 1/(alpha w).
    """

    amp_nm2mm: float = 8e-3     # A
    gamma_exp: float = 1.2
    alpha: float = 1.0
    beam_radius_mm: float = 5.0
    lambda_nm: float = 2000.0

    def __post_init__(self):
        if self.gamma_exp <= 1:
            raise ValueError("spectral exponent must exceed 1 (divergent integral)")
        for name in ("amp_nm2mm", "alpha", "beam_radius_mm", "lambda_nm"):
            if getattr(self, name) <= 0 and not (name == "amp_nm2mm" and getattr(self, name) == 0):
                raise ValueError(f"{name} must be positive")


def scatter_loss(s: ScatterModel) -> float:
    """Round-trip scatter loss fraction per optic.

    (4 pi / lambda[nm])^2 A (gamma-1)^(-1) (1/(sqrt2 alpha w[mm]))^(1-gamma),
    read as a plain fraction: the default model parameters give 2.3e-6,
    a few ppm of scatter per optic.
    """
    g = s.gamma_exp
    return ((4.0 * np.pi / s.lambda_nm) ** 2 * s.amp_nm2mm / (g - 1.0)
            * (1.0 / (np.sqrt(2.0) * s.alpha * s.beam_radius_mm)) ** (1.0 - g))


@dataclass(frozen=True)
class RinModel:
    """Relative intensity noise ASD: floor times (f + f0)/f."""

    floor: float = 1e-9
    corner_hz: float = 50.0

    def __post_init__(self):
        if self.floor < 0 or self.corner_hz < 0:
            raise ValueError("RIN parameters must be non-negative")


def rin(model: RinModel, f_hz):
    """RIN ASD in 1/rtHz; diverges as 1/f below the corner."""
    f = np.asarray(f_hz, dtype=float)
    if np.any(f <= 0):
        raise ValueError("RIN is defined for f > 0")
    return np.abs((f + model.corner_hz) / f) * model.floor


def rin_displacement(p: RingCavityParams, pump: PumpParams, p_circ,
                     model: RinModel, f_hz):
    """Common-mode mirror displacement ASD (m/rtHz) driven by pump RIN.

    Per-mirror radiation-pressure force (2 P_circ cos(th)/c) RIN(f), each
    projected back onto the round-trip length with another cos(th), displaced
    through the pendulum susceptibility and summed coherently: the common
    pump drives all three mirrors in phase.
    """
    f = np.asarray(f_hz, dtype=float)
    om = 2.0 * np.pi * f
    chi = np.abs(susceptibility(p, om))
    wsum = sum(np.cos(th) ** 2 for th in p.theta_inc_rad)
    return chi * (2.0 * p_circ / scc.c) * rin(model, f) * wsum


@dataclass(frozen=True)
class BackscatterParams:
    """Pump power back-scattered into the counter-propagating mode."""

    fraction: float = 1e-7
    pump: PumpParams = PumpParams()
    rin_model: RinModel = RinModel()

    def __post_init__(self):
        if not 0 <= self.fraction < 1:
            raise ValueError("backscatter fraction must lie in [0, 1)")


def backscatter_noise(b: BackscatterParams, f_hz):
    """Backscatter noise in quanta/rtHz per quadrature.

    sqrt(0.5 E_bs P_source / (2 hbar w0)) RIN(f); the 1/sqrt2 splits the
    noise evenly between the two quadratures.
    """
    amp = np.sqrt(0.5 * b.fraction * b.pump.p_source_w
                  / (2.0 * scc.hbar * b.pump.omega0))
    return amp * rin(b.rin_model, f_hz)


@dataclass(frozen=True)
class SuspensionParams:
    """Lower-stage suspension fiber of one amplifier mirror.

    Rectangular ribbon of silicon; surface loss dominates at 123 K, with the
    bulk and thermoelastic terms retained for completeness. The pendulum
    frequency follows from the pendulum length unless overridden.
    """

    mass_kg: float = 0.030
    temperature_k: float = 123.0
    fiber_width_m: float = 250e-6
    fiber_thickness_m: float = 50e-6
    n_fibers: int = 2
    pendulum_length_m: float = 0.60
    phi_surface: float = 1e-5
    phi_bulk: float = 2e-9
    surface_depth_m: float = 1e-6
    young_modulus_pa: float = 155.8e9
    cte_per_k: float = 1e-10
    dlogy_dt_per_k: float = -2e-5
    heat_capacity_j_kgk: float = 300.0
    conductivity_w_mk: float = 700.0
    density_kg_m3: float = 2329.0
    pend_freq_hz: float | None = None

    def __post_init__(self):
        positive = ("mass_kg", "temperature_k", "fiber_width_m",
                    "fiber_thickness_m", "pendulum_length_m",
                    "young_modulus_pa", "heat_capacity_j_kgk",
                    "conductivity_w_mk", "density_kg_m3")
        for name in positive:
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.phi_surface < 0 or self.phi_bulk < 0:
            raise ValueError("loss angles must be >= 0")
        if self.n_fibers < 1:
            raise ValueError("need at least one fiber")

    @property
    def omega_pend(self) -> float:
        if self.pend_freq_hz is not None:
            return 2.0 * np.pi * self.pend_freq_hz
        return float(np.sqrt(scc.g / self.pendulum_length_m))

    @property
    def surface_to_volume(self) -> float:
        """2 (w + t) / (w t) for the rectangular ribbon section."""
        w, t = self.fiber_width_m, self.fiber_thickness_m
        return 2.0 * (w + t) / (w * t)


def loss_angle(s: SuspensionParams, f_hz):
    """phi(omega) = phi_bulk + phi_s h (S/V) + thermoelastic term.

    The thermoelastic contribution uses the static fiber stress to offset the
    (vanishing, at 123 K) thermal expansion; for silicon ribbons here it is
    many orders below the surface term.
    """
    f = np.asarray(f_hz, dtype=float)
    surface = s.phi_surface * s.surface_depth_m * s.surface_to_volume
    # thermoelastic: Zener peak with stress-modified effective expansion
    sigma0 = s.mass_kg * scc.g / (s.n_fibers * s.fiber_width_m * s.fiber_thickness_m)
    alpha_eff = s.cte_per_k - (sigma0 / s.young_modulus_pa) * s.dlogy_dt_per_k
    tau = (s.density_kg_m3 * s.heat_capacity_j_kgk
           * s.fiber_thickness_m ** 2) / (np.pi ** 2 * s.conductivity_w_mk)
    om_tau = 2.0 * np.pi * f * tau
    delta2 = (s.young_modulus_pa * s.temperature_k * alpha_eff ** 2
              / (s.density_kg_m3 * s.heat_capacity_j_kgk))
    thermoelastic = delta2 * om_tau / (1.0 + om_tau ** 2)
    return s.phi_bulk + surface + thermoelastic


def suspension_thermal(s: SuspensionParams, f_hz):
    """Displacement ASD (m/rtHz) of one suspended mirror.

    Fluctuation-dissipation form for a pendulum with structural loss:
    x(w) = sqrt( (4 kB T / w m) w0^2 phi / (w0^4 phi^2 + (w0^2 - w^2)^2) ).
    """
    f = np.asarray(f_hz, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequency must be > 0")
    om = 2.0 * np.pi * f
    om0 = s.omega_pend
    phi = loss_angle(s, f)
    num = om0 ** 2 * phi
    den = om0 ** 4 * phi ** 2 + (om0 ** 2 - om ** 2) ** 2
    return np.sqrt(4.0 * scc.k * s.temperature_k / (om * s.mass_kg) * num / den)


def coating_brownian(d_eff_m: float, phi_eff: float, beam_radius_m: float,
                     temperature_k: float, f_hz,
                     substrate_young_pa: float = 155.8e9,
                     substrate_poisson: float = 0.27):
    """Coating Brownian displacement ASD (m/rtHz) of one optic.

    Half-infinite-substrate thin-coating form:
    S_x(f) = (2 kB T / pi^2 f) d_eff phi_eff (1 - sigma^2) / (w^2 Y_sub),
    with d_eff and phi_eff the thickness-weighted totals of the stack.
    """
    if d_eff_m < 0 or phi_eff < 0:
        raise ValueError("coating thickness and loss must be >= 0")
    f = np.asarray(f_hz, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequency must be > 0")
    s_x = (2.0 * scc.k * temperature_k / (np.pi ** 2 * f)
           * d_eff_m * phi_eff * (1.0 - substrate_poisson ** 2)
           / (beam_radius_m ** 2 * substrate_young_pa))
    return np.sqrt(s_x)
