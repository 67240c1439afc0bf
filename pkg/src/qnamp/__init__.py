"""Quantum noise modeling for a squeezed-light interferometer readout chain
with a Mach-Zehnder optomechanical phase-sensitive amplifier.

Fields are handled in the Caves-Schumaker two-photon formalism: every optical
element is a frequency-indexed 2x2 complex matrix acting on the (amplitude,
phase) quadrature pair, and every noise source is a vacuum or classical PSD
routed to the homodyne readout through such a matrix.
"""

__version__ = "0.1.0"

from .grid import FrequencyGrid
from .twophoton import (
    QuadratureTransfer,
    NoisePath,
    SignalPath,
    compose,
    rotation,
    squeeze,
    loss_channel,
    homodyne,
    signal_referred,
)

__all__ = [
    "FrequencyGrid",
    "QuadratureTransfer",
    "NoisePath",
    "SignalPath",
    "compose",
    "rotation",
    "squeeze",
    "loss_channel",
    "homodyne",
    "signal_referred",
    "__version__",
]
