"""Three-stage recovery of the user-side channel parameters.

Stage 1 stacks the conjugate-transposed coarse block estimates, splits off
the dominant left singular vector, and scans a 1D reciprocal projection
spectrum for the UE departure angle.  Stage 2 cross-multiplies per-block
coupling measurements to cancel the unknown gain, then scans a 2D spectrum
whose peak marks the surface-side arrival direction.  Stage 3 solves a
scalar least-squares problem for the complex path gain.

The BS-side angles (theta_b, phi_b, psi_b) are survey inputs throughout and
are never estimated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ArraySet, ChannelParams, cascaded_channel
from .errors import ConfigurationError, EstimationError, InsufficientSoundingsError
from .errors import DegenerateGeometryError
from .geometry import UlaConfig, UpaConfig, ula_response_at, upa_response
from .spectra import parabolic_offset, projection_power_1d, projection_power_2d, pseudo_spectrum

THETA_SPAN_DEG = (-90.0, 90.0)
RIS_SPAN_DEG = (0.0, 90.0)

_ROW_SPACE_TOL = 1e-8


@dataclass(frozen=True)
class SearchGrid:
    """Grid-search resolutions, in degrees.

    The 1D sweep covers [-90, 90] at theta_step_deg.  The 2D sweep covers
    [0, 90]^2 at coarse_step_deg, then re-scans a +/- fine_window_deg box
    around the coarse peak at fine_step_deg before parabolic refinement.
    """

    theta_step_deg: float = 0.1
    coarse_step_deg: float = 0.5
    fine_step_deg: float = 0.02
    fine_window_deg: float = 1.0

    def __post_init__(self) -> None:
        for name in ("theta_step_deg", "coarse_step_deg", "fine_step_deg", "fine_window_deg"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be > 0")
        if self.fine_window_deg < self.fine_step_deg:
            raise ConfigurationError("fine_window_deg must cover at least one fine step")


@dataclass(frozen=True)
class SpectrumGrid1D:
    """Sampled 1D pseudo-spectrum with its grid geometry (radians)."""

    start: float
    stop: float
    step: float
    values: np.ndarray
    peak_index: int

    def angles(self) -> np.ndarray:
        """Reconstructed grid angles the values were sampled at."""
        return self.start + self.step * np.arange(len(self.values))


@dataclass(frozen=True)
class SpectrumGrid2D:
    """Sampled 2D pseudo-spectrum over an azimuth-by-elevation grid (radians)."""

    phi_axis: np.ndarray
    psi_axis: np.ndarray
    values: np.ndarray
    peak_index: tuple[int, int]


@dataclass(frozen=True)
class ChannelEstimate:
    """Output of the full pipeline, angles in radians, plus diagnostics.

    couplings holds the per-block coupling measurements; residual is the
    gain-cancelling system applied to the surface response at the refined
    angles (near zero when the fit is good).
    """

    theta_u_hat: float
    phi_u_hat: float
    psi_u_hat: float
    gain_hat: complex
    couplings: np.ndarray
    residual: np.ndarray
    theta_spectrum: SpectrumGrid1D
    ris_spectrum: SpectrumGrid2D


def _axis_deg(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(round((hi - lo) / step))
    return lo + step * np.arange(n + 1)


def estimate_theta_u(
    coarse: np.ndarray, ue_cfg: UlaConfig, grid: SearchGrid | None = None
) -> tuple[float, SpectrumGrid1D]:
    """Departure angle at the UE from the stacked coarse block estimates.

    A single block already suffices: the stacked matrix has a rank-1 signal
    part whose column space is the UE steering vector, so the reciprocal
    projection onto the remaining singular vectors peaks at the true angle.
    """
    grid = grid or SearchGrid()
    coarse = np.asarray(coarse, dtype=np.complex128)
    if coarse.ndim != 3:
        raise ConfigurationError("expected a stack of per-block coarse estimates")
    stacked = np.concatenate([blk.conj().T for blk in coarse], axis=1)
    if not np.any(stacked):
        raise EstimationError("all-zero coarse estimates; nothing to estimate from")
    left, _, _ = np.linalg.svd(stacked, full_matrices=False)
    if left.shape[1] < 2:
        raise EstimationError("not enough columns to form a noise subspace")
    noise_basis = left[:, 1:]

    axis_deg = _axis_deg(*THETA_SPAN_DEG, grid.theta_step_deg)
    axis = np.deg2rad(axis_deg)
    power = projection_power_1d(noise_basis, np.sin(axis), ue_cfg.spacing_wavelengths)
    values = pseudo_spectrum(power)
    peak = int(np.argmax(values))
    theta = float(axis[peak])
    if 0 < peak < len(axis) - 1:
        logv = np.log(values[peak - 1 : peak + 2])
        offset = parabolic_offset(logv[0], logv[1], logv[2])
        theta += offset * float(np.deg2rad(grid.theta_step_deg))
    spectrum = SpectrumGrid1D(
        start=float(axis[0]),
        stop=float(axis[-1]),
        step=float(np.deg2rad(grid.theta_step_deg)),
        values=values,
        peak_index=peak,
    )
    return theta, spectrum


def estimate_coupling(
    coarse_block: np.ndarray,
    theta_b: float,
    theta_u_hat: float,
    bs_cfg: UlaConfig,
    ue_cfg: UlaConfig,
) -> complex:
    """Per-block coupling scalar recovered by beamforming both array sides.

    Normalized by n_bs * n_ue so the noiseless value equals the coupling
    scalar itself; any common scale would cancel downstream anyway.
    """
    a_b = ula_response_at(theta_b, bs_cfg)
    a_u = ula_response_at(theta_u_hat, ue_cfg)
    raw = a_b.conj() @ np.asarray(coarse_block) @ a_u
    return complex(raw / (bs_cfg.n_elements * ue_cfg.n_elements))


def build_null_system(
    couplings: np.ndarray,
    omegas: np.ndarray,
    phi_b: float,
    psi_b: float,
    ris_cfg: UpaConfig,
    ref_index: int = 0,
) -> np.ndarray:
    """Cross-block rows whose null space contains the UE-side surface response.

    Pairing block j against the reference block cancels the unknown gain:
    row_j = conj(a_rb) * (c_ref * omega_j - c_j * omega_ref), elementwise, so
    row_j @ a_ru = c_ref * s_j - c_j * s_ref = 0 for noiseless couplings.
    Returns an (L-1) x n_r matrix.
    """
    couplings = np.asarray(couplings, dtype=np.complex128)
    omegas = np.asarray(omegas, dtype=np.complex128)
    n_blocks = couplings.shape[0]
    if n_blocks < 2:
        raise InsufficientSoundingsError(
            "need at least two sounding blocks to cancel the gain"
        )
    if omegas.shape != (n_blocks, ris_cfg.n_elements):
        raise ConfigurationError(
            f"omegas must have shape ({n_blocks}, {ris_cfg.n_elements}), got {omegas.shape}"
        )
    if not 0 <= ref_index < n_blocks:
        raise ConfigurationError(f"ref_index {ref_index} out of range for {n_blocks} blocks")
    a_rb = upa_response(phi_b, psi_b, ris_cfg)
    others = [j for j in range(n_blocks) if j != ref_index]
    rows = a_rb.conj() * (
        couplings[ref_index] * omegas[others]
        - couplings[others, None] * omegas[ref_index]
    )
    return rows


def _row_space_basis(rows: np.ndarray) -> np.ndarray:
    """Orthonormal basis Q of the row space, ||Q^H a|| = 0 iff rows @ a = 0."""
    _, sigma, vh = np.linalg.svd(rows, full_matrices=False)
    if sigma.size == 0 or not sigma[0] > 0.0:
        raise EstimationError("all-zero system; cannot locate the surface response")
    keep = sigma > _ROW_SPACE_TOL * sigma[0]
    return vh[keep].conj().T


def _scan_2d(
    basis: np.ndarray,
    ris_cfg: UpaConfig,
    phi_axis_deg: np.ndarray,
    psi_axis_deg: np.ndarray,
) -> tuple[np.ndarray, tuple[int, int]]:
    phi = np.deg2rad(phi_axis_deg)
    psi = np.deg2rad(psi_axis_deg)
    sin_phi = np.sin(phi)[:, None]
    ux = (sin_phi * np.sin(psi)[None, :]).ravel()
    uy = (sin_phi * np.cos(psi)[None, :]).ravel()
    power = projection_power_2d(
        basis, ris_cfg.n_x, ris_cfg.n_y, ris_cfg.spacing_wavelengths, ux, uy
    )
    values = pseudo_spectrum(power).reshape(len(phi_axis_deg), len(psi_axis_deg))
    # np.argmax takes the first flat maximum, i.e. smallest phi then psi
    flat_peak = int(np.argmax(values))
    return values, divmod(flat_peak, values.shape[1])


def estimate_ris_angles(
    null_system: np.ndarray, ris_cfg: UpaConfig, grid: SearchGrid | None = None
) -> tuple[float, float, SpectrumGrid2D]:
    """Azimuth/elevation of the UE path at the surface via a two-stage scan.

    The coarse scan covers the full quarter-sphere; the fine scan re-samples
    a small box around the coarse peak, and per-axis parabolic interpolation
    on the log-spectrum removes the remaining grid bias.
    """
    grid = grid or SearchGrid()
    rows = np.atleast_2d(np.asarray(null_system, dtype=np.complex128))
    basis = _row_space_basis(rows)

    phi_axis_deg = _axis_deg(*RIS_SPAN_DEG, grid.coarse_step_deg)
    psi_axis_deg = _axis_deg(*RIS_SPAN_DEG, grid.coarse_step_deg)
    values, (pk_phi, pk_psi) = _scan_2d(basis, ris_cfg, phi_axis_deg, psi_axis_deg)
    spectrum = SpectrumGrid2D(
        phi_axis=np.deg2rad(phi_axis_deg),
        psi_axis=np.deg2rad(psi_axis_deg),
        values=values,
        peak_index=(pk_phi, pk_psi),
    )

    lo, hi = RIS_SPAN_DEG
    window = grid.fine_window_deg
    fine_phi_deg = _axis_deg(
        max(lo, phi_axis_deg[pk_phi] - window),
        min(hi, phi_axis_deg[pk_phi] + window),
        grid.fine_step_deg,
    )
    fine_psi_deg = _axis_deg(
        max(lo, psi_axis_deg[pk_psi] - window),
        min(hi, psi_axis_deg[pk_psi] + window),
        grid.fine_step_deg,
    )
    fine_values, (fi, fj) = _scan_2d(basis, ris_cfg, fine_phi_deg, fine_psi_deg)

    phi_deg = float(fine_phi_deg[fi])
    psi_deg = float(fine_psi_deg[fj])
    log_values = np.log(fine_values)
    if 0 < fi < len(fine_phi_deg) - 1:
        col = log_values[fi - 1 : fi + 2, fj]
        phi_deg += parabolic_offset(col[0], col[1], col[2]) * grid.fine_step_deg
    if 0 < fj < len(fine_psi_deg) - 1:
        row = log_values[fi, fj - 1 : fj + 2]
        psi_deg += parabolic_offset(row[0], row[1], row[2]) * grid.fine_step_deg
    return float(np.deg2rad(phi_deg)), float(np.deg2rad(psi_deg)), spectrum


def estimate_gain(
    coarse: np.ndarray,
    omegas: np.ndarray,
    theta_b: float,
    phi_b: float,
    psi_b: float,
    theta_u_hat: float,
    phi_u_hat: float,
    psi_u_hat: float,
    arrays: ArraySet,
) -> complex:
    """Least-squares complex path gain given all recovered angles.

    Stacks per-block beamformed observations b_i against their noise-free
    models v_i; the scalar solution is v^H b / ||v||^2.  Called with the true
    angles this is the perfect-knowledge baseline.
    """
    coarse = np.asarray(coarse, dtype=np.complex128)
    omegas = np.asarray(omegas, dtype=np.complex128)
    a_b = ula_response_at(theta_b, arrays.bs)
    a_u = ula_response_at(theta_u_hat, arrays.ue)
    a_rb = upa_response(phi_b, psi_b, arrays.ris)
    a_ru = upa_response(phi_u_hat, psi_u_hat, arrays.ris)
    scalars = omegas @ (a_rb.conj() * a_ru)            # per-block a_rb^H diag(w) a_ru
    observed = coarse @ a_u                            # (L, n_bs)
    model = arrays.ue.n_elements * scalars[:, None] * a_b
    denom = float(np.vdot(model, model).real)
    if denom == 0.0:
        raise DegenerateGeometryError("all soundings nulled the link; gain unobservable")
    return complex(np.vdot(model, observed) / denom)


def estimate_channel(
    soundings,
    theta_b: float,
    phi_b: float,
    psi_b: float,
    arrays: ArraySet,
    grid: SearchGrid | None = None,
    ref_policy: str = "first",
) -> ChannelEstimate:
    """Run all three stages on one sounding set.

    ref_policy picks the reference block for the gain-cancelling rows:
    "first" (default) or "strongest" (largest coupling magnitude, more robust
    when the first block happens to sit near a null).
    """
    grid = grid or SearchGrid()
    theta_u_hat, theta_spectrum = estimate_theta_u(soundings.coarse, arrays.ue, grid)
    couplings = np.array(
        [
            estimate_coupling(block, theta_b, theta_u_hat, arrays.bs, arrays.ue)
            for block in soundings.coarse
        ]
    )
    if ref_policy == "first":
        ref_index = 0
    elif ref_policy == "strongest":
        ref_index = int(np.argmax(np.abs(couplings)))
    else:
        raise ConfigurationError(f"unknown ref_policy {ref_policy!r}")
    rows = build_null_system(
        couplings, soundings.omegas, phi_b, psi_b, arrays.ris, ref_index=ref_index
    )
    phi_u_hat, psi_u_hat, ris_spectrum = estimate_ris_angles(rows, arrays.ris, grid)
    gain_hat = estimate_gain(
        soundings.coarse,
        soundings.omegas,
        theta_b,
        phi_b,
        psi_b,
        theta_u_hat,
        phi_u_hat,
        psi_u_hat,
        arrays,
    )
    residual = rows @ upa_response(phi_u_hat, psi_u_hat, arrays.ris)
    return ChannelEstimate(
        theta_u_hat=theta_u_hat,
        phi_u_hat=phi_u_hat,
        psi_u_hat=psi_u_hat,
        gain_hat=gain_hat,
        couplings=couplings,
        residual=residual,
        theta_spectrum=theta_spectrum,
        ris_spectrum=ris_spectrum,
    )


def reconstruct_channel(
    estimate: ChannelEstimate,
    omega: np.ndarray,
    theta_b: float,
    phi_b: float,
    psi_b: float,
    arrays: ArraySet,
) -> np.ndarray:
    """Channel matrix rebuilt from the estimate for one phase profile."""
    params = ChannelParams(
        theta_u=estimate.theta_u_hat,
        theta_b=theta_b,
        phi_u=estimate.phi_u_hat,
        psi_u=estimate.psi_u_hat,
        phi_b=phi_b,
        psi_b=psi_b,
        gain=estimate.gain_hat,
    )
    return cascaded_channel(params, omega, arrays)
