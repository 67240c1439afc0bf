"""Multilayer dielectric coatings: characteristic-matrix reflectivity, a
Brownian-noise proxy, and constrained thickness optimization of the
high-reflectivity stack."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np


class InfeasibleStackError(ValueError):
    """No stack satisfying the transmission constraint was found."""


@dataclass(frozen=True)
class Layer:
    """One dielectric layer: index, physical thickness, mechanical loss."""

    n: float
    d_m: float
    phi_mech: float = 0.0
    material: str = ""

    def __post_init__(self):
        if self.n <= 1:
            raise ValueError("layer index must exceed 1")
        if self.d_m <= 0:
            raise ValueError("layer thickness must be > 0")
        if self.phi_mech < 0:
            raise ValueError("mechanical loss must be >= 0")


@dataclass(frozen=True)
class CoatingStack:
    """Ordered layer list, air side first, on a semi-infinite substrate."""

    layers: tuple
    n_substrate: float = 3.5
    lambda_design_m: float = 2e-6

    def __post_init__(self):
        if self.n_substrate <= 0 or self.lambda_design_m <= 0:
            raise ValueError("substrate index and design wavelength must be > 0")
        object.__setattr__(self, "layers", tuple(self.layers))


# aSi/SiN HR coating constants at 123 K
ASI = {"n": 3.65, "phi": 3e-5, "material": "aSi"}
SIN = {"n": 2.17, "phi": 2e-5, "material": "SiN"}


def quarter_wave_stack(n_pairs=12, lambda_m=2e-6, n_substrate=3.5,
                       high=ASI, low=SIN) -> CoatingStack:
    """Canonical quarter-wave HL stack, high-index layer on the air side."""
    layers = []
    for _ in range(n_pairs):
        layers.append(Layer(high["n"], lambda_m / (4 * high["n"]),
                            high["phi"], high["material"]))
        layers.append(Layer(low["n"], lambda_m / (4 * low["n"]),
                            low["phi"], low["material"]))
    return CoatingStack(tuple(layers), n_substrate, lambda_m)


def stack_transmission(s: CoatingStack, lambda_m=None):
    """(R, T) power coefficients at normal incidence, lossless model.

    Standard characteristic-matrix product per layer between vacuum and the
    substrate; R + T = 1 identically in this model.
    """
    lam = s.lambda_design_m if lambda_m is None else lambda_m
    m = np.eye(2, dtype=complex)
    for layer in s.layers:
        delta = 2.0 * np.pi * layer.n * layer.d_m / lam
        cd, sd = np.cos(delta), np.sin(delta)
        m = m @ np.array([[cd, 1j * sd / layer.n], [1j * layer.n * sd, cd]])
    n0, ns = 1.0, s.n_substrate
    b, c = m @ np.array([1.0, ns])
    r = (n0 * b - c) / (n0 * b + c)
    refl = float(np.abs(r) ** 2)
    return refl, 1.0 - refl


def brownian_proxy(s: CoatingStack):
    """(d_eff, phi_eff): total thickness and thickness-weighted loss angle."""
    if not s.layers:
        raise ValueError("empty stack has no Brownian proxy")
    d = np.array([layer.d_m for layer in s.layers])
    phi = np.array([layer.phi_mech for layer in s.layers])
    d_eff = float(d.sum())
    return d_eff, float((d * phi).sum() / d_eff)


def stack_objective(s: CoatingStack) -> float:
    """Brownian figure of merit d_eff * phi_eff = sum(d_j phi_j)."""
    d_eff, phi_eff = brownian_proxy(s)
    return d_eff * phi_eff


def optimize_stack(n_pairs=12, t_max=5e-6, lambda_m=2e-6, n_substrate=3.5,
                   high=ASI, low=SIN, seed=0, n_restarts=4, max_iter=60):
    """Thickness optimization of the HR stack under a transmission cap.

    Coordinate descent on the layer thicknesses minimizing sum(d_j phi_j)
    subject to stack_transmission <= t_max, started from the quarter-wave
    stack and from seeded random perturbations of it. Deterministic for a
    fixed seed; the accepted objective is non-increasing. Raises
    InfeasibleStackError if the quarter-wave stack itself violates the cap.
    """
    base = quarter_wave_stack(n_pairs, lambda_m, n_substrate, high, low)
    _, t0 = stack_transmission(base)
    if t0 > t_max:
        raise InfeasibleStackError(
            f"quarter-wave stack transmits {t0:.3g} > cap {t_max:.3g}")

    rng = np.random.default_rng(seed)
    qw = np.array([layer.d_m for layer in base.layers])
    lo, hi = 0.05 * qw, 3.0 * qw

    def build(d):
        return CoatingStack(
            tuple(replace(layer, d_m=float(di))
                  for layer, di in zip(base.layers, d)),
            n_substrate, lambda_m)

    def feasible_objective(d):
        s = build(d)
        _, t = stack_transmission(s)
        if t > t_max:
            return None
        return stack_objective(s)

    best_d, best_obj = qw.copy(), stack_objective(base)
    starts = [qw.copy()]
    starts += [np.clip(qw * rng.uniform(0.7, 1.3, size=qw.size), lo, hi)
               for _ in range(n_restarts)]
    for start in starts:
        d = start.copy()
        obj = feasible_objective(d)
        if obj is None:
            d, obj = qw.copy(), stack_objective(base)
        step = 0.25 * qw
        for _ in range(max_iter):
            improved = False
            for j in range(d.size):
                for sgn in (-1.0, +1.0):
                    trial = d.copy()
                    trial[j] = np.clip(trial[j] + sgn * step[j], lo[j], hi[j])
                    cand = feasible_objective(trial)
                    if cand is not None and cand < obj:
                        d, obj, improved = trial, cand, True
            if not improved:
                step *= 0.5
                if np.all(step < 1e-12):
                    break
        if obj < best_obj:
            best_d, best_obj = d, obj
    return build(best_d)


def export_stack(s: CoatingStack) -> str:
    """Serialize as text records: one 'material n d_nm phi' line per layer."""
    lines = [f"# substrate n={s.n_substrate!r} lambda_nm={s.lambda_design_m * 1e9!r}"]
    for layer in s.layers:
        lines.append(f"{layer.material or 'layer'} {layer.n!r} "
                     f"{layer.d_m * 1e9!r} {layer.phi_mech!r}")
    return "\n".join(lines) + "\n"


def import_stack(text: str) -> CoatingStack:
    """Parse the export format back into a stack."""
    n_sub, lam = 3.5, 2e-6
    layers = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if tok.startswith("n="):
                    n_sub = float(tok[2:])
                elif tok.startswith("lambda_nm="):
                    lam = float(tok[10:]) * 1e-9
            continue
        mat, n, d_nm, phi = line.split()
        layers.append(Layer(float(n), float(d_nm) * 1e-9, float(phi), mat))
    return CoatingStack(tuple(layers), n_sub, lam)
