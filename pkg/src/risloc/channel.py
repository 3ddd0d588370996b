"""Rank-one line-of-sight channels through a phase-shifting surface.

With a single propagation path per hop every channel matrix is an outer
product of steering vectors, so the whole uplink collapses to one complex
coupling scalar times a fixed BS-by-UE outer product.  That scalar is what
the surface's phase profile modulates and what the estimator exploits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .geometry import UlaConfig, UpaConfig, ula_response_at, upa_response


@dataclass(frozen=True)
class ArraySet:
    """The three apertures of one uplink: BS line, UE line, surface."""

    bs: UlaConfig
    ue: UlaConfig
    ris: UpaConfig


@dataclass(frozen=True)
class ChannelParams:
    """Scenario angles (radians) and the end-to-end complex path gain.

    theta_u / theta_b are the departure angle at the UE and arrival angle at
    the BS.  (phi_u, psi_u) is the azimuth/elevation of the UE path seen from
    the surface, (phi_b, psi_b) the same for the BS path.  Only the product
    gain of the two hops is modeled; the factors are not identifiable
    separately.
    """

    theta_u: float
    theta_b: float
    phi_u: float
    psi_u: float
    phi_b: float
    psi_b: float
    gain: complex = 1.0 + 0.0j


def ue_ris_channel(params: ChannelParams, arrays: ArraySet) -> np.ndarray:
    """Unit-gain rank-1 channel from the UE array to the surface."""
    a_ru = upa_response(params.phi_u, params.psi_u, arrays.ris)
    a_u = ula_response_at(params.theta_u, arrays.ue)
    return np.outer(a_ru, a_u.conj())


def _check_profile(omega: np.ndarray, ris: UpaConfig) -> np.ndarray:
    omega = np.asarray(omega)
    if omega.shape != (ris.n_elements,):
        raise ConfigurationError(
            f"phase profile must have shape ({ris.n_elements},), got {omega.shape}"
        )
    return omega


def effective_gain(params: ChannelParams, omega: np.ndarray, arrays: ArraySet) -> complex:
    """Coupling scalar g * a_rb^H diag(omega) a_ru for one phase profile.

    The diagonal structure reduces the quadratic form to one elementwise
    product, no dense matrix involved.
    """
    omega = _check_profile(omega, arrays.ris)
    a_rb = upa_response(params.phi_b, params.psi_b, arrays.ris)
    a_ru = upa_response(params.phi_u, params.psi_u, arrays.ris)
    return complex(params.gain * np.sum(a_rb.conj() * omega * a_ru))


def cascaded_channel(params: ChannelParams, omega: np.ndarray, arrays: ArraySet) -> np.ndarray:
    """End-to-end BS-by-UE channel matrix for one surface phase profile."""
    c = effective_gain(params, omega, arrays)
    a_b = ula_response_at(params.theta_b, arrays.bs)
    a_u = ula_response_at(params.theta_u, arrays.ue)
    return c * np.outer(a_b, a_u.conj())


def random_phase_shifts(rng: np.random.Generator, n_r: int) -> np.ndarray:
    """Phase profile with i.i.d. angles uniform over the unit circle."""
    if n_r < 1:
        raise ConfigurationError(f"n_r must be >= 1, got {n_r}")
    return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, size=n_r))
