"""CSV readers for the engine's budget and gain tables."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class MissingColumnError(KeyError):
    """A required column is absent; the message names it."""


class EmptyTableError(ValueError):
    """The CSV has a header but no data rows (or no header at all)."""


def _read_csv(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyTableError(f"{path}: empty CSV")
        rows = [row for row in reader if row]
    if not rows:
        raise EmptyTableError(f"{path}: no data rows")
    data = np.array(rows, dtype=float)
    return {name: data[:, i] for i, name in enumerate(header)}


@dataclass(frozen=True)
class BudgetTable:
    """Frequency column plus named ASD columns from a budget CSV."""

    path: str
    columns: dict

    @classmethod
    def load(cls, path) -> "BudgetTable":
        cols = _read_csv(path)
        for required in ("f_hz", "total"):
            if required not in cols:
                raise MissingColumnError(
                    f"{path}: missing required column {required!r}")
        f = cols["f_hz"]
        if np.any(np.diff(f) <= 0):
            raise ValueError(f"{path}: frequency column is not increasing")
        return cls(str(path), cols)

    @property
    def f_hz(self) -> np.ndarray:
        return self.columns["f_hz"]

    @property
    def total(self) -> np.ndarray:
        return self.columns["total"]

    def source_names(self):
        return [k for k in self.columns if k not in ("f_hz", "total")]

    def require(self, names):
        missing = [n for n in names if n not in self.columns]
        if missing:
            raise MissingColumnError(
                f"{self.path}: missing columns {', '.join(missing)}")
        return [self.columns[n] for n in names]


@dataclass(frozen=True)
class GainTable:
    """Gain-curve CSV: readout gain and the reference scaling-law curve."""

    path: str
    f_hz: np.ndarray
    gain_readout: np.ndarray
    gain_reference: np.ndarray

    @classmethod
    def load(cls, path) -> "GainTable":
        cols = _read_csv(path)
        missing = [n for n in ("f_hz", "gain_readout", "gain_reference")
                   if n not in cols]
        if missing:
            raise MissingColumnError(
                f"{path}: missing columns {', '.join(missing)}")
        return cls(str(path), cols["f_hz"], cols["gain_readout"],
                   cols["gain_reference"])

    def unity_crossing_hz(self) -> float:
        """Frequency where the reference curve crosses unity (log interp)."""
        g = self.gain_reference
        above = g >= 1.0
        if above.all() or not above.any():
            raise ValueError(f"{self.path}: reference gain never crosses 1")
        i = int(np.nonzero(above[:-1] & ~above[1:])[0][0])
        lf = np.log(self.f_hz[i:i + 2])
        lg = np.log(g[i:i + 2])
        return float(np.exp(lf[0] + (0.0 - lg[0]) * (lf[1] - lf[0])
                            / (lg[1] - lg[0])))
