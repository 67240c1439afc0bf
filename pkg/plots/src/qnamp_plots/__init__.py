"""Figure generation for qnamp CSV outputs. No physics lives here: every
curve is read back from the CSVs the engine wrote."""

__version__ = "0.1.0"

from .tables import BudgetTable, GainTable, MissingColumnError
from .figures import (
    render_budget,
    render_gain,
    render_mass_sweep,
    render_triptych,
)

__all__ = [
    "BudgetTable",
    "GainTable",
    "MissingColumnError",
    "render_budget",
    "render_gain",
    "render_mass_sweep",
    "render_triptych",
    "__version__",
]
