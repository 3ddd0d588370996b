"""Uplink training protocol: orthogonal pilots, noisy blocks, coarse estimates.

The UE transmits one orthogonal pilot block per surface configuration.  The
BS correlates against the pilots to form a coarse per-block channel estimate
whose error is white with per-entry variance n_streams / power; that scaling
is the single knob through which SNR enters the estimator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .channel import ArraySet, ChannelParams, cascaded_channel
from .errors import ConfigurationError, InsufficientSoundingsError


@dataclass(frozen=True)
class PilotMatrix:
    """Pilot block S with S S^H = S^H S = (power / n) I."""

    s: np.ndarray
    power: float


def make_pilots(n_u: int, power: float) -> PilotMatrix:
    """Scaled DFT pilot block; deterministic and orthogonal by construction."""
    if n_u < 1:
        raise ConfigurationError(f"n_u must be >= 1, got {n_u}")
    if not power > 0:
        raise ConfigurationError(f"power must be > 0, got {power}")
    s = (np.sqrt(power) / n_u) * scipy.linalg.dft(n_u)
    return PilotMatrix(s=s, power=float(power))


def complex_noise(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly symmetric complex Gaussian samples, unit variance per entry."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def sound(
    channel: np.ndarray,
    pilots: PilotMatrix,
    rng: np.random.Generator | None = None,
    noise_on: bool = True,
) -> np.ndarray:
    """One sounding block: the pilot matrix through the channel plus noise."""
    channel = np.asarray(channel)
    if channel.shape[1] != pilots.s.shape[0]:
        raise ConfigurationError(
            f"channel has {channel.shape[1]} inputs but pilots have {pilots.s.shape[0]} streams"
        )
    x = channel @ pilots.s
    if noise_on:
        if rng is None:
            raise ConfigurationError("noise requested but no rng supplied")
        x = x + complex_noise(rng, x.shape)
    return x


def coarse_estimate(x: np.ndarray, pilots: PilotMatrix) -> np.ndarray:
    """Pilot-matched per-block channel estimate (n / power) X S^H."""
    n = pilots.s.shape[0]
    return (n / pilots.power) * (np.asarray(x) @ pilots.s.conj().T)


@dataclass(frozen=True)
class SoundingSet:
    """L sounding blocks: phase profiles, received samples, coarse estimates."""

    omegas: np.ndarray    # (L, n_r)
    received: np.ndarray  # (L, n_bs, n_ue)
    coarse: np.ndarray    # (L, n_bs, n_ue)
    pilots: PilotMatrix

    def __post_init__(self) -> None:
        if len(self.omegas) < 2:
            raise InsufficientSoundingsError(
                "angle recovery needs at least two sounding blocks"
            )
        if not len(self.omegas) == len(self.received) == len(self.coarse):
            raise ConfigurationError("per-block array lengths disagree")

    @property
    def n_blocks(self) -> int:
        return len(self.omegas)


def collect_soundings(
    params: ChannelParams,
    omegas: np.ndarray,
    pilots: PilotMatrix,
    arrays: ArraySet,
    noise_rngs=None,
) -> SoundingSet:
    """Run the L-block protocol for one channel realization.

    noise_rngs supplies one independent generator per block so results do not
    depend on block evaluation order; None runs the protocol noiseless.
    """
    omegas = np.asarray(omegas, dtype=np.complex128)
    if noise_rngs is not None and len(noise_rngs) != len(omegas):
        raise ConfigurationError("need one noise stream per sounding block")
    received = []
    coarse = []
    for i, omega in enumerate(omegas):
        h = cascaded_channel(params, omega, arrays)
        if noise_rngs is None:
            x = sound(h, pilots, noise_on=False)
        else:
            x = sound(h, pilots, rng=noise_rngs[i])
        received.append(x)
        coarse.append(coarse_estimate(x, pilots))
    return SoundingSet(
        omegas=omegas,
        received=np.stack(received),
        coarse=np.stack(coarse),
        pilots=pilots,
    )
