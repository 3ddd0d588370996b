"""Plot rendering for risloc simulator outputs, consuming only its file formats."""

from .io import (
    SWEEP_COLUMNS,
    NoDataError,
    SchemaError,
    read_spectrum_grid,
    read_sweep_csv,
)
from .render import KINDS, render, render_figure

__all__ = [
    "KINDS",
    "NoDataError",
    "SWEEP_COLUMNS",
    "SchemaError",
    "read_spectrum_grid",
    "read_sweep_csv",
    "render",
    "render_figure",
]
