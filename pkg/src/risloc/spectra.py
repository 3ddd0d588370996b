"""Pseudo-spectrum primitives with a compiled fast path.

Both kernel backends expose the same two projection primitives; this module
picks one at import time (the env var RISLOC_BACKEND forces "numpy" or
"compiled", default "auto") and layers input normalization, the reciprocal
spectrum, and parabolic peak refinement on top.
"""

from __future__ import annotations

import os

import numpy as np

from .errors import ConfigurationError

_choice = os.environ.get("RISLOC_BACKEND", "auto").strip().lower() or "auto"
if _choice == "numpy":
    from . import _kernels_np as _impl

    backend_name = "numpy"
elif _choice in ("auto", "compiled"):
    try:
        from . import _kernels as _impl

        backend_name = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise ImportError(
                "RISLOC_BACKEND=compiled but the extension is not built; "
                "reinstall with a C compiler or unset the variable"
            ) from None
        from . import _kernels_np as _impl

        backend_name = "numpy"
else:
    raise ConfigurationError(
        f"unknown RISLOC_BACKEND {_choice!r}; use auto, numpy, or compiled"
    )


def load_backend(name: str):
    """Return a kernel module by name, independent of the import-time pick."""
    if name == "numpy":
        from . import _kernels_np

        return _kernels_np
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ConfigurationError(f"unknown backend {name!r}; use numpy or compiled")


def projection_power_1d(basis: np.ndarray, u: np.ndarray, spacing: float) -> np.ndarray:
    """||basis^H a(u)||^2 per grid point for a line array."""
    basis = np.ascontiguousarray(basis, dtype=np.complex128)
    if basis.ndim != 2 or basis.shape[1] < 1:
        raise ConfigurationError("basis must be a 2D matrix with at least one column")
    u = np.ascontiguousarray(u, dtype=np.float64)
    return _impl.projection_power_1d(basis, u, float(spacing))


def projection_power_2d(
    basis: np.ndarray,
    n_x: int,
    n_y: int,
    spacing: float,
    ux: np.ndarray,
    uy: np.ndarray,
) -> np.ndarray:
    """||basis^H a(ux, uy)||^2 per grid point for a planar array."""
    basis = np.ascontiguousarray(basis, dtype=np.complex128)
    if basis.ndim != 2 or basis.shape[1] < 1:
        raise ConfigurationError("basis must be a 2D matrix with at least one column")
    ux = np.ascontiguousarray(ux, dtype=np.float64)
    uy = np.ascontiguousarray(uy, dtype=np.float64)
    return _impl.projection_power_2d(basis, int(n_x), int(n_y), float(spacing), ux, uy)


def pseudo_spectrum(power: np.ndarray) -> np.ndarray:
    """Reciprocal projection power, floored so exact nulls stay finite."""
    return 1.0 / np.maximum(power, np.finfo(np.float64).tiny)


_CUSP_MARGIN = 30.0


def parabolic_offset(y_left: float, y_center: float, y_right: float) -> float:
    """Sub-grid peak offset, in step units, of the parabola through 3 samples.

    Returns 0 when the samples do not bow downward (no proper local max) or
    when the center towers over both neighbors by more than ~30 log units: a
    machine-precision null is a cusp on the log scale, and fitting a parabola
    across it would turn the sides' slight asymmetry into a spurious offset.
    The offset is clamped to one step either side.
    """
    if y_center - max(y_left, y_right) > _CUSP_MARGIN:
        return 0.0
    denom = y_left - 2.0 * y_center + y_right
    if not np.isfinite(denom) or denom >= 0.0:
        return 0.0
    offset = 0.5 * (y_left - y_right) / denom
    return float(np.clip(offset, -1.0, 1.0))
