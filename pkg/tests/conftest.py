"""Shared scenario builders for the test suite."""
import numpy as np

from risloc import ArraySet, ChannelParams, UlaConfig, UpaConfig


def reference_arrays(n_x=8, n_y=8):
    return ArraySet(bs=UlaConfig(12), ue=UlaConfig(8), ris=UpaConfig(n_x, n_y))


def reference_params(gain=1.0 + 0.0j):
    d = np.deg2rad
    return ChannelParams(
        theta_u=d(40.0), theta_b=d(40.0),
        phi_u=d(50.0), psi_u=d(30.0),
        phi_b=d(50.0), psi_b=d(65.0),
        gain=gain,
    )
