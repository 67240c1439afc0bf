"""Sideband frequency grid shared by all chain elements."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class FrequencyGrid:
    """Ordered grid of signal sideband frequencies.

    Parameters
    ----------
    f_hz : array_like
        Sideband frequencies Omega/2pi in Hz. Must be strictly increasing,
        finite and positive.
    """

    f_hz: np.ndarray = field(repr=False)

    def __post_init__(self):
        f = np.asarray(self.f_hz, dtype=float)
        if f.ndim != 1 or f.size == 0:
            raise ValueError("frequency grid must be a non-empty 1-d array")
        if not np.all(np.isfinite(f)):
            raise ValueError("frequency grid must be finite")
        if np.any(f <= 0):
            raise ValueError("frequency grid must be positive")
        if np.any(np.diff(f) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        f.setflags(write=False)
        object.__setattr__(self, "f_hz", f)

    @classmethod
    def default(cls, f_min=5.0, f_max=1e4, n=1000) -> "FrequencyGrid":
        """Logarithmic grid, 5 Hz to 10 kHz with 1000 points by default."""
        return cls(np.logspace(np.log10(f_min), np.log10(f_max), n))

    @property
    def omega(self) -> np.ndarray:
        """Angular sideband frequency Omega in rad/s."""
        return 2.0 * np.pi * self.f_hz

    @property
    def n(self) -> int:
        return self.f_hz.size

    def __len__(self) -> int:
        return self.f_hz.size

    def same_as(self, other: "FrequencyGrid") -> bool:
        return self.f_hz.shape == other.f_hz.shape and np.array_equal(
            self.f_hz, other.f_hz
        )
