"""Vectorized projection kernels: the pure-numpy twin of the compiled module.

Both kernels compute, per grid point, the squared norm of the steering
vector's projection onto a given subspace basis.  The planar kernel exploits
the Kronecker factorization of the steering vector, so only n_x + n_y
complex exponentials are synthesized per point and no grid-sized steering
matrix is ever materialized; grids are processed in fixed-size chunks to
bound memory.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 8192


def projection_power_1d(basis: np.ndarray, u: np.ndarray, spacing: float) -> np.ndarray:
    """Per-point ||basis^H a(u)||^2 for an n-element line array.

    basis: (n, k) complex, columns spanning the subspace.
    u: (g,) direction cosines.  Returns (g,) float.
    """
    basis = np.asarray(basis, dtype=np.complex128)
    u = np.asarray(u, dtype=np.float64)
    steering = np.exp((-2j * np.pi * spacing) * np.outer(np.arange(basis.shape[0]), u))
    t = basis.conj().T @ steering
    return np.einsum("kg,kg->g", t, t.conj()).real


def projection_power_2d(
    basis: np.ndarray,
    n_x: int,
    n_y: int,
    spacing: float,
    ux: np.ndarray,
    uy: np.ndarray,
) -> np.ndarray:
    """Per-point ||basis^H a(ux, uy)||^2 for an n_x-by-n_y planar array.

    basis: (n_x * n_y, k) complex with x-major row ordering.
    ux, uy: (g,) per-axis direction cosines.  Returns (g,) float.
    """
    basis = np.asarray(basis, dtype=np.complex128)
    ux = np.asarray(ux, dtype=np.float64)
    uy = np.asarray(uy, dtype=np.float64)
    if basis.shape[0] != n_x * n_y:
        raise ValueError(f"basis has {basis.shape[0]} rows, expected {n_x * n_y}")
    if ux.shape != uy.shape:
        raise ValueError("ux and uy must have the same length")
    k = basis.shape[1]
    lattice = np.conj(basis).T.reshape(k, n_x, n_y)
    coef = -2j * np.pi * spacing
    px = np.arange(n_x)
    qy = np.arange(n_y)
    out = np.empty(ux.shape[0])
    for lo in range(0, ux.shape[0], _CHUNK):
        sl = slice(lo, lo + _CHUNK)
        ax = np.exp(coef * ux[sl][:, None] * px)
        ay = np.exp(coef * uy[sl][:, None] * qy)
        t = np.tensordot(ay, lattice, axes=([1], [2]))  # (g, k, n_x)
        s = np.einsum("gkp,gp->gk", t, ax)
        out[sl] = np.einsum("gk,gk->g", s, s.conj()).real
    return out
