"""Evaluation quantities: pooled NMSE, aligned phase profiles, spectral efficiency."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ArraySet, ChannelParams, cascaded_channel
from .errors import DegenerateGeometryError
from .geometry import UpaConfig, ula_response_at, upa_response


@dataclass(frozen=True)
class TrialOutcome:
    """Per-trial summary reduced by the Monte-Carlo harness.

    nmse_num / nmse_den are the squared Frobenius error and the true channel
    energy; keeping them separate lets the pool be a ratio of means rather
    than a mean of ratios.
    """

    nmse_num: float
    nmse_den: float
    se_bits: float
    theta_err_deg: float
    phi_err_deg: float
    psi_err_deg: float
    gain_err_rel: float


def frobenius_error_terms(h_hat: np.ndarray, h_true: np.ndarray) -> tuple[float, float]:
    """Squared error energy and true energy for one reconstruction."""
    h_hat = np.asarray(h_hat)
    h_true = np.asarray(h_true)
    num = float(np.linalg.norm(h_hat - h_true) ** 2)
    den = float(np.linalg.norm(h_true) ** 2)
    return num, den


def nmse(outcomes) -> float:
    """Pooled error ratio: mean error energy over mean channel energy."""
    if len(outcomes) == 0:
        raise ValueError("no trial outcomes to pool")
    num = float(np.mean([o.nmse_num for o in outcomes]))
    den = float(np.mean([o.nmse_den for o in outcomes]))
    if den == 0.0:
        raise DegenerateGeometryError("zero channel energy across trials; ratio undefined")
    return num / den


def nmse_db(value: float) -> float:
    """NMSE on the decibel scale used for reporting."""
    if value < 0.0:
        raise ValueError(f"NMSE cannot be negative, got {value}")
    if value == 0.0:
        return float("-inf")
    return float(10.0 * np.log10(value))


def optimal_phase_shifts(
    phi_u: float, psi_u: float, phi_b: float, psi_b: float, ris_cfg: UpaConfig
) -> np.ndarray:
    """Unit-modulus profile that phase-aligns the surface's two responses.

    Element m rotates the arriving phase onto the departing one, so the
    reflected contributions add coherently and the inner product
    |a_rb^H diag(w) a_ru| reaches its upper bound n_r at the design angles.
    """
    a_rb = upa_response(phi_b, psi_b, ris_cfg)
    a_ru = upa_response(phi_u, psi_u, ris_cfg)
    return a_rb * a_ru.conj()


def spectral_efficiency(
    params: ChannelParams,
    arrays: ArraySet,
    power: float,
    theta_u_hat: float,
    phi_u_hat: float,
    psi_u_hat: float,
) -> float:
    """Single-trial rate in bits/s/Hz with angle-derived beams and phases.

    The true channel is steered by the profile designed from the estimated
    angles; the combiner uses the known BS angle, the precoder the estimated
    UE angle.  Base-2 logarithm.
    """
    omega = optimal_phase_shifts(phi_u_hat, psi_u_hat, params.phi_b, params.psi_b, arrays.ris)
    h = cascaded_channel(params, omega, arrays)
    combiner = ula_response_at(params.theta_b, arrays.bs) / np.sqrt(arrays.bs.n_elements)
    precoder = ula_response_at(theta_u_hat, arrays.ue) / np.sqrt(arrays.ue.n_elements)
    link = np.vdot(combiner, h @ precoder)
    return float(np.log2(1.0 + (abs(link) ** 2) * power))
