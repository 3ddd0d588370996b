"""Figure builders for the four supported plot kinds.

Everything renders through the Agg backend so output is a file, never a
window, and a given input renders to identical bytes on repeat runs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import read_spectrum_grid, read_sweep_csv

KINDS = ("spectrum-surface", "nmse-vs-snr", "nmse-vs-L", "se-vs-snr")

# (x column, x label, [(y column, series label, line style)], group columns)
_CURVES = {
    "nmse-vs-snr": (
        "snr_db",
        "SNR (dB)",
        [("nmse_db_proposed", "proposed", "-o"), ("nmse_db_oracle", "known-angle LS", "--s")],
        ("L", "n_x", "n_y"),
        "NMSE (dB)",
    ),
    "nmse-vs-L": (
        "L",
        "sounding blocks L",
        [("nmse_db_proposed", "proposed", "-o"), ("nmse_db_oracle", "known-angle LS", "--s")],
        ("snr_db", "n_x", "n_y"),
        "NMSE (dB)",
    ),
    "se-vs-snr": (
        "snr_db",
        "SNR (dB)",
        [("se_proposed", "proposed", "-o"), ("se_oracle", "known-angle LS", "--s")],
        ("L", "n_x", "n_y"),
        "spectral efficiency (bits/s/Hz)",
    ),
}


def _group_label(kind: str, key: tuple) -> str:
    if kind == "nmse-vs-L":
        snr, n_x, n_y = key
        return f"{int(n_x)}x{int(n_y)}, {snr:g} dB"
    n_blocks, n_x, n_y = key
    return f"{int(n_x)}x{int(n_y)}, L={int(n_blocks)}"


def _curve_figure(kind: str, data: dict):
    x_col, x_label, series, group_cols, y_label = _CURVES[kind]
    keys = sorted(set(zip(*(data[c] for c in group_cols))))
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for idx, key in enumerate(keys):
        mask = np.ones(len(data[x_col]), dtype=bool)
        for col, val in zip(group_cols, key):
            mask &= data[col] == val
        order = np.argsort(data[x_col][mask])
        color = colors[idx % len(colors)]
        for y_col, label, style in series:
            ax.plot(
                data[x_col][mask][order],
                data[y_col][mask][order],
                style,
                color=color,
                label=f"{_group_label(kind, key)}, {label}",
            )
    ax.set_xticks(sorted(set(data[x_col])))
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _spectrum_figure(phi, psi, values):
    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    mesh = ax.pcolormesh(psi, phi, np.log10(values), shading="nearest", cmap="viridis")
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    ax.plot(psi[j], phi[i], "rx", markersize=8, label=f"peak ({phi[i]:g}, {psi[j]:g})")
    ax.set_xlabel("elevation (deg)")
    ax.set_ylabel("azimuth (deg)")
    fig.colorbar(mesh, ax=ax, label="pseudo-spectrum (log10)")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def render_figure(kind: str, in_path):
    """Build the figure for one plot kind from one input file."""
    if kind == "spectrum-surface":
        return _spectrum_figure(*read_spectrum_grid(in_path))
    if kind in _CURVES:
        return _curve_figure(kind, read_sweep_csv(in_path))
    raise ValueError(f"unknown plot kind {kind!r}; expected one of {KINDS}")


def render(kind: str, in_path, out_path) -> None:
    """Render one input file to one image file."""
    fig = render_figure(kind, in_path)
    try:
        fig.savefig(out_path)
    finally:
        plt.close(fig)
