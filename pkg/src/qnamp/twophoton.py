"""Two-photon quadrature algebra: transfer matrices, noise paths, losses and
homodyne projection.

Conventions
-----------
* Quadrature pairs are (amplitude, phase) column vectors.
* A transfer is an (N, 2, 2) complex array over the frequency grid.
* Vacuum normalization: the single-sided PSD of each vacuum quadrature is 1
  (quanta units), so squeezing by X dB multiplies the squeezed-quadrature
  PSD by 10^(-X/10). Classical noises are converted into the same units
  before accumulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .grid import FrequencyGrid


class GridMismatchError(ValueError):
    """Two chain elements were built on different frequency grids."""


def _as_matrices(grid, m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.shape == (2, 2):
        m = np.broadcast_to(m, (grid.n, 2, 2)).copy()
    if m.shape != (grid.n, 2, 2):
        raise ValueError(f"expected (N, 2, 2) matrices, got {m.shape}")
    return m


@dataclass(frozen=True)
class QuadratureTransfer:
    """Frequency-indexed 2x2 complex matrix acting on a quadrature pair."""

    grid: FrequencyGrid
    matrices: np.ndarray = field(repr=False)  # (N, 2, 2) complex
    label: str = ""

    def __post_init__(self):
        m = _as_matrices(self.grid, self.matrices)
        if not np.all(np.isfinite(m)):
            raise ValueError("transfer matrix entries must be finite")
        m.setflags(write=False)
        object.__setattr__(self, "matrices", m)

    @classmethod
    def identity(cls, grid, label="identity") -> "QuadratureTransfer":
        return cls(grid, np.broadcast_to(np.eye(2), (grid.n, 2, 2)), label)

    def det(self) -> np.ndarray:
        return np.linalg.det(self.matrices)

    def dagger_product(self) -> np.ndarray:
        """M^dagger M per frequency point (Hermitian)."""
        return np.conj(np.swapaxes(self.matrices, 1, 2)) @ self.matrices

    def scaled(self, factor) -> "QuadratureTransfer":
        """Multiply by a scalar or per-frequency factor."""
        fac = np.asarray(factor, dtype=complex)
        if fac.ndim == 1:
            fac = fac[:, None, None]
        return QuadratureTransfer(self.grid, self.matrices * fac, self.label)


@dataclass(frozen=True)
class NoisePath:
    """A noise input and its route to the readout.

    Attributes
    ----------
    input_psd : float or (N,) array
        Single-sided PSD of the input per quadrature. Unit vacuum = 1.
    transfer : QuadratureTransfer
        Transfer from the injection point to the readout.
    coupling : (2,) or (2, 2) or (N, 2) or (N, 2, 2) array
        Selects which quadratures the input enters. A 2x2 identity means
        independent unit inputs on both quadratures.
    label : str
        Budget source tag.
    """

    input_psd: np.ndarray
    transfer: QuadratureTransfer
    coupling: np.ndarray
    label: str = ""

    def __post_init__(self):
        grid = self.transfer.grid
        psd = np.asarray(self.input_psd, dtype=float)
        if psd.ndim == 0:
            psd = np.full(grid.n, float(psd))
        if psd.shape != (grid.n,):
            raise ValueError("input_psd must be scalar or (N,)")
        if np.any(psd < 0):
            raise ValueError("input_psd must be non-negative")
        c = np.asarray(self.coupling, dtype=complex)
        if c.shape == (2,):
            c = np.broadcast_to(c[:, None], (grid.n, 2, 1)).copy()
        elif c.shape == (2, 2):
            c = np.broadcast_to(c, (grid.n, 2, 2)).copy()
        elif c.shape == (grid.n, 2):
            c = c[:, :, None]
        elif c.shape not in ((grid.n, 2, 2), (grid.n, 2, 1)):
            raise ValueError(f"bad coupling shape {np.shape(self.coupling)}")
        psd.setflags(write=False)
        object.__setattr__(self, "input_psd", psd)
        object.__setattr__(self, "coupling", np.ascontiguousarray(c))

    @classmethod
    def vacuum(cls, grid, label="vacuum") -> "NoisePath":
        """Unit vacuum entering both quadratures through the identity."""
        return cls(1.0, QuadratureTransfer.identity(grid), np.eye(2), label)

    def through(self, m: QuadratureTransfer) -> "NoisePath":
        """Propagate this path through a downstream element."""
        return replace(self, transfer=compose(m, self.transfer))

    def attenuated(self, amplitude_factor) -> "NoisePath":
        return replace(self, transfer=self.transfer.scaled(amplitude_factor))


@dataclass(frozen=True)
class SignalPath:
    """Per-frequency complex 2-vector mapping strain h to output quadratures."""

    grid: FrequencyGrid
    transfer: np.ndarray = field(repr=False)  # (N, 2) complex

    def __post_init__(self):
        t = np.asarray(self.transfer, dtype=complex)
        if t.shape != (self.grid.n, 2):
            raise ValueError("signal transfer must be (N, 2)")
        if not np.all(np.isfinite(t)):
            raise ValueError("signal transfer must be finite")
        if not np.any(np.abs(t) > 0):
            raise ValueError("signal transfer vanishes on the whole band")
        t.setflags(write=False)
        object.__setattr__(self, "transfer", t)

    def through(self, m: QuadratureTransfer) -> "SignalPath":
        out = (m.matrices @ self.transfer[:, :, None])[:, :, 0]
        return SignalPath(self.grid, out)

    def scaled(self, factor) -> "SignalPath":
        fac = np.asarray(factor, dtype=complex)
        if fac.ndim == 1:
            fac = fac[:, None]
        return SignalPath(self.grid, self.transfer * fac)


def compose(a: QuadratureTransfer, b: QuadratureTransfer) -> QuadratureTransfer:
    """Pointwise matrix product a.b (b applied first)."""
    if not a.grid.same_as(b.grid):
        raise GridMismatchError("cannot compose transfers on different grids")
    return QuadratureTransfer(a.grid, a.matrices @ b.matrices,
                              label=(a.label or b.label))


def rotation(grid: FrequencyGrid, theta, label="rotation") -> QuadratureTransfer:
    """Quadrature rotation [[cos, -sin], [sin, cos]].

    ``theta`` may be a scalar or a per-frequency array (radians).
    """
    th = np.broadcast_to(np.asarray(theta, dtype=float), (grid.n,))
    if not np.all(np.isfinite(th)):
        raise ValueError("rotation angle must be finite")
    m = np.zeros((grid.n, 2, 2), dtype=complex)
    m[:, 0, 0] = np.cos(th)
    m[:, 0, 1] = -np.sin(th)
    m[:, 1, 0] = np.sin(th)
    m[:, 1, 1] = np.cos(th)
    return QuadratureTransfer(grid, m, label)


def squeeze(grid: FrequencyGrid, db, angle=0.0, label="squeeze") -> QuadratureTransfer:
    """Squeeze operator parameterized in decibels.

    In the basis rotated by ``angle`` the squeezed quadrature gets amplitude
    gain s = 10^(-db/20) and the anti-squeezed one 1/s, so the squeezed
    quadrature PSD shrinks by exactly 10^(-db/10).
    """
    if db < 0:
        raise ValueError("squeeze level must be >= 0 dB")
    s = 10.0 ** (-db / 20.0)
    core = np.array([[s, 0.0], [0.0, 1.0 / s]], dtype=complex)
    m = np.broadcast_to(core, (grid.n, 2, 2))
    out = QuadratureTransfer(grid, m, label)
    if angle != 0.0:
        out = compose(compose(rotation(grid, angle), out), rotation(grid, -angle))
    return out


def loss_channel(paths, epsilon, grid=None, label="loss"):
    """Apply a power-loss fraction to a set of noise paths.

    Existing transfers are scaled by sqrt(1-epsilon) and one new unit-vacuum
    path with coupling sqrt(epsilon) on both quadratures is appended, so
    vacuum normalization is preserved for any epsilon in [0, 1).

    ``epsilon`` may be a scalar or per-frequency array.
    """
    eps = np.asarray(epsilon, dtype=float)
    if np.any(eps < 0) or np.any(eps >= 1):
        raise ValueError("loss fraction must lie in [0, 1)")
    paths = list(paths)
    if grid is None:
        if not paths:
            raise ValueError("need a grid when the path set is empty")
        grid = paths[0].transfer.grid
    out = [p.attenuated(np.sqrt(1.0 - eps)) for p in paths]
    if np.any(eps > 0):
        coup = np.zeros((grid.n, 2, 2), dtype=complex)
        diag = np.broadcast_to(np.sqrt(eps), (grid.n,))
        coup[:, 0, 0] = diag
        coup[:, 1, 1] = diag
        out.append(NoisePath(1.0, QuadratureTransfer.identity(grid), coup, label))
    return out


def homodyne(zeta, paths, sig: SignalPath | None = None):
    """Project a set of noise paths (and optionally a signal) onto b_zeta.

    Measures b_zeta = b1 cos(zeta) + b2 sin(zeta). Returns the total noise
    PSD, and the complex signal gain if a SignalPath is given.

    Noise PSD = sum_k || v^T M_k(O) c_k ||^2 S_k(O) with v = (cos z, sin z).
    """
    paths = list(paths)
    if not paths and sig is None:
        raise ValueError("nothing to project")
    grid = sig.grid if sig is not None else paths[0].transfer.grid
    z = np.broadcast_to(np.asarray(zeta, dtype=float), (grid.n,))
    v = np.stack([np.cos(z), np.sin(z)], axis=1)[:, None, :]  # (N, 1, 2)
    psd = np.zeros(grid.n)
    for p in paths:
        if not p.transfer.grid.same_as(grid):
            raise GridMismatchError(f"path {p.label!r} on a different grid")
        row = (v @ p.transfer.matrices @ p.coupling)[:, 0, :]
        psd += np.sum(np.abs(row) ** 2, axis=1) * p.input_psd
    if sig is None:
        return psd
    gain = (v @ sig.transfer[:, :, None])[:, 0, 0]
    return psd, gain


def signal_referred(noise_psd, signal_gain, normalization=1.0):
    """Signal-referred amplitude spectral density.

    ASD = sqrt(noise PSD) / |signal gain| * normalization. Points with
    vanishing signal gain are flagged with +inf rather than raising.
    """
    psd = np.asarray(noise_psd, dtype=float)
    g = np.abs(np.asarray(signal_gain))
    with np.errstate(divide="ignore", invalid="ignore"):
        asd = np.sqrt(psd) / g * normalization
    asd = np.where(g > 0, asd, np.inf)
    return asd
