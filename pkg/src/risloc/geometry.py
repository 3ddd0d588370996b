"""Steering-vector models for the line arrays and the planar surface.

Angles are radians everywhere inside the library; degree conversion happens
at the CLI/config boundary.  A plane wave at angle ``theta`` off broadside
hits an N-element line array with direction cosine ``u = sin(theta)``, giving
element k the phase ``-k * 2*pi * (d/lambda) * u``.  The planar surface
factors into an x-axis and a y-axis line array joined by a Kronecker
product, flattened x-major.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InvalidDirectionError

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class UlaConfig:
    """Uniform linear array: element count and pitch in carrier wavelengths."""

    n_elements: int
    spacing_wavelengths: float = 0.5

    def __post_init__(self) -> None:
        if self.n_elements < 1:
            raise ConfigurationError(f"n_elements must be >= 1, got {self.n_elements}")
        if not self.spacing_wavelengths > 0:
            raise ConfigurationError(
                f"spacing_wavelengths must be > 0, got {self.spacing_wavelengths}"
            )


@dataclass(frozen=True)
class UpaConfig:
    """Uniform planar array: per-axis element counts and pitch in wavelengths."""

    n_x: int
    n_y: int
    spacing_wavelengths: float = 0.2

    def __post_init__(self) -> None:
        if self.n_x < 1 or self.n_y < 1:
            raise ConfigurationError(f"grid must be at least 1x1, got {self.n_x}x{self.n_y}")
        if not self.spacing_wavelengths > 0:
            raise ConfigurationError(
                f"spacing_wavelengths must be > 0, got {self.spacing_wavelengths}"
            )

    @property
    def n_elements(self) -> int:
        return self.n_x * self.n_y


def _line_response(u: float, n: int, spacing: float) -> np.ndarray:
    return np.exp((-1j * _TWO_PI * spacing * u) * np.arange(n))


def ula_response(u: float, cfg: UlaConfig) -> np.ndarray:
    """Line-array response for a direction cosine u in [-1, 1].

    Entry k is exp(-j * k * 2*pi * (d/lambda) * u); the first entry is 1.
    """
    if not np.isfinite(u) or abs(u) > 1.0:
        raise InvalidDirectionError(f"direction cosine must lie in [-1, 1], got {u}")
    return _line_response(float(u), cfg.n_elements, cfg.spacing_wavelengths)


def ula_response_at(angle: float, cfg: UlaConfig) -> np.ndarray:
    """Line-array response at a physical angle in radians off broadside."""
    if not np.isfinite(angle) or abs(angle) > np.pi / 2 + 1e-9:
        raise InvalidDirectionError(f"angle must lie in [-pi/2, pi/2], got {angle}")
    return _line_response(float(np.sin(angle)), cfg.n_elements, cfg.spacing_wavelengths)


def upa_response(phi: float, psi: float, cfg: UpaConfig) -> np.ndarray:
    """Planar-surface response at azimuth phi and elevation psi, radians.

    The x axis sees direction cosine sin(phi)*sin(psi) and the y axis
    sin(phi)*cos(psi).  Flattening is x-major: flat index p * n_y + q pairs
    x-element p with y-element q.
    """
    if not (np.isfinite(phi) and np.isfinite(psi)):
        raise InvalidDirectionError(f"angles must be finite, got ({phi}, {psi})")
    sin_phi = np.sin(phi)
    ax = _line_response(sin_phi * np.sin(psi), cfg.n_x, cfg.spacing_wavelengths)
    ay = _line_response(sin_phi * np.cos(psi), cfg.n_y, cfg.spacing_wavelengths)
    return np.kron(ax, ay)
