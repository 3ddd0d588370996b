# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled projection kernels, same contract as the numpy twin module.

Steering phasors are synthesized by recurrence (one sincos per point and
axis instead of one per element), and the planar kernel feeds chunks of
points through a single BLAS contraction, so the hot loop runs at matrix
multiply speed without materializing anything grid-sized.
"""

from libc.math cimport M_PI, cos, sin
from libc.stdlib cimport free, malloc

import numpy as np

from scipy.linalg.cython_blas cimport zgemm

ctypedef double complex cplx

# points per BLAS call; keeps the chunk workspace around 2 MB at k*nx = 64
DEF CHUNK = 2048


def projection_power_1d(basis, u, spacing):
    """Per-point ||basis^H a(u)||^2 for an n-element line array.

    basis: (n, k) complex, columns spanning the subspace.
    u: (g,) direction cosines.  Returns (g,) float.
    """
    basis = np.asarray(basis, dtype=np.complex128)
    cdef cplx[:, ::1] bt = np.ascontiguousarray(basis.conj().T)
    cdef double[::1] ug = np.ascontiguousarray(u, dtype=np.float64)
    out_arr = np.empty(ug.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double coef = -2.0 * M_PI * spacing
    cdef Py_ssize_t k = bt.shape[0], n = bt.shape[1], g = ug.shape[0]
    cdef Py_ssize_t i, j, m
    cdef double ph, acc
    cdef cplx t, w, cur
    cdef cplx* steer = <cplx*> malloc(n * sizeof(cplx))
    if steer == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(g):
                ph = coef * ug[i]
                w = cos(ph) + 1j * sin(ph)
                cur = 1.0
                for m in range(n):
                    steer[m] = cur
                    cur = cur * w
                acc = 0.0
                for j in range(k):
                    t = 0
                    for m in range(n):
                        t = t + bt[j, m] * steer[m]
                    acc += t.real * t.real + t.imag * t.imag
                out[i] = acc
    finally:
        free(steer)
    return out_arr


def projection_power_2d(basis, n_x, n_y, spacing, ux, uy):
    """Per-point ||basis^H a(ux, uy)||^2 for an n_x-by-n_y planar array.

    basis: (n_x * n_y, k) complex with x-major row ordering.
    ux, uy: (g,) per-axis direction cosines.  Returns (g,) float.

    Per chunk of points, the y-axis phasors hit the lattice in one zgemm
    (its Fortran view of the C-ordered buffers needs no copies), and the
    cheap x-axis contraction finishes per point in plain loops.
    """
    basis = np.asarray(basis, dtype=np.complex128)
    if basis.shape[0] != n_x * n_y:
        raise ValueError(f"basis has {basis.shape[0]} rows, expected {n_x * n_y}")
    cdef Py_ssize_t k = basis.shape[1], nx = n_x, ny = n_y
    # (k * nx, ny) row-major: row j * nx + p holds conj(basis)[p-th x line]
    cdef cplx[:, ::1] lat = np.ascontiguousarray(
        np.conj(basis).T.reshape(k * nx, ny)
    )
    cdef double[::1] uxg = np.ascontiguousarray(ux, dtype=np.float64)
    cdef double[::1] uyg = np.ascontiguousarray(uy, dtype=np.float64)
    if uxg.shape[0] != uyg.shape[0]:
        raise ValueError("ux and uy must have the same length")
    out_arr = np.empty(uxg.shape[0], dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t g = uxg.shape[0]

    cdef cplx[:, ::1] ax = np.empty((CHUNK, nx), dtype=np.complex128)
    cdef cplx[:, ::1] ay = np.empty((CHUNK, ny), dtype=np.complex128)
    cdef cplx[:, ::1] t = np.empty((CHUNK, k * nx), dtype=np.complex128)

    cdef double coef = -2.0 * M_PI * spacing
    cdef double ph, acc
    cdef cplx w, cur, s
    cdef Py_ssize_t start, n_pts, i, j, p, q
    cdef int m_i = <int> (k * nx), n_i, k_i = <int> ny
    cdef cplx alpha = 1.0, beta = 0.0
    cdef char* trans_a = b"T"
    cdef char* trans_b = b"N"

    for start in range(0, g, CHUNK):
        n_pts = min(<Py_ssize_t> CHUNK, g - start)
        n_i = <int> n_pts
        with nogil:
            for i in range(n_pts):
                ph = coef * uxg[start + i]
                w = cos(ph) + 1j * sin(ph)
                cur = 1.0
                for p in range(nx):
                    ax[i, p] = cur
                    cur = cur * w
                ph = coef * uyg[start + i]
                w = cos(ph) + 1j * sin(ph)
                cur = 1.0
                for q in range(ny):
                    ay[i, q] = cur
                    cur = cur * w
            # t[i, j * nx + p] = sum_q lat[j * nx + p, q] * ay[i, q]
            zgemm(
                trans_a, trans_b, &m_i, &n_i, &k_i,
                &alpha, &lat[0, 0], &k_i, &ay[0, 0], &k_i,
                &beta, &t[0, 0], &m_i,
            )
            for i in range(n_pts):
                acc = 0.0
                for j in range(k):
                    s = 0
                    for p in range(nx):
                        s = s + ax[i, p] * t[i, j * nx + p]
                    acc += s.real * s.real + s.imag * s.imag
                out[start + i] = acc
    return out_arr
