"""Readers for the simulator's two output formats.

Sweep CSV: '#' comment lines, one header row, numeric data rows with a fixed
column set.  Spectrum grid: whitespace-separated numbers whose first row is
the elevation axis, first column the azimuth axis, and body the spectrum.
Both readers refuse anything that deviates, naming what is wrong.
"""

from __future__ import annotations

import numpy as np

SWEEP_COLUMNS = (
    "snr_db",
    "L",
    "n_x",
    "n_y",
    "trials",
    "failures",
    "nmse_db_proposed",
    "nmse_db_oracle",
    "se_proposed",
    "se_oracle",
    "theta_err_deg",
    "phi_err_deg",
    "psi_err_deg",
    "gain_err_rel",
    "seed",
)


class SchemaError(ValueError):
    """Input file does not match the expected layout."""


class NoDataError(ValueError):
    """Input file is well-formed but carries no data rows."""


def read_sweep_csv(path) -> dict:
    """Load a sweep CSV into a dict of named float arrays."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise NoDataError(f"{path}: no header row")
    header = [cell.strip() for cell in lines[0].split(",")]
    missing = [c for c in SWEEP_COLUMNS if c not in header]
    unexpected = [c for c in header if c not in SWEEP_COLUMNS]
    if missing or unexpected:
        parts = []
        if missing:
            parts.append(f"missing columns {missing}")
        if unexpected:
            parts.append(f"unexpected columns {unexpected}")
        raise SchemaError(f"{path}: " + "; ".join(parts))
    if len(header) != len(set(header)):
        raise SchemaError(f"{path}: duplicate columns in header")

    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = [cell.strip() for cell in line.split(",")]
        if len(cells) != len(header):
            raise SchemaError(
                f"{path}: row {lineno} has {len(cells)} cells, expected {len(header)}"
            )
        parsed = []
        for name, cell in zip(header, cells):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise SchemaError(
                    f"{path}: row {lineno}, column {name!r}: {cell!r} is not a number"
                ) from None
        rows.append(parsed)
    if not rows:
        raise NoDataError(f"{path}: no data rows")
    table = np.array(rows)
    return {name: table[:, header.index(name)] for name in SWEEP_COLUMNS}


def read_spectrum_grid(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Load a spectrum dump; returns (phi axis deg, psi axis deg, values)."""
    try:
        block = np.loadtxt(path)
    except ValueError as exc:
        raise SchemaError(f"{path}: not a numeric grid: {exc}") from exc
    if block.ndim != 2 or block.shape[0] < 2 or block.shape[1] < 2:
        raise SchemaError(
            f"{path}: expected an axis row, an axis column, and a body; "
            f"got shape {block.shape}"
        )
    phi = block[1:, 0]
    psi = block[0, 1:]
    values = block[1:, 1:]
    if not np.all(np.isfinite(values)):
        raise SchemaError(f"{path}: spectrum body contains non-finite values")
    if np.any(values <= 0):
        raise SchemaError(f"{path}: spectrum body must be positive")
    return phi, psi, values
