"""Subspace channel estimation for a surface-assisted mmWave MIMO uplink.

The library simulates L pilot soundings through a reconfigurable phase-
shifting surface, recovers the user-side angles and the complex path gain in
three stages (1D subspace scan, gain-cancelled 2D scan, scalar least
squares), and evaluates reconstruction quality and spectral efficiency over
seeded Monte-Carlo sweeps.  See the README for the CLI and file formats.
"""

from .channel import (
    ArraySet,
    ChannelParams,
    cascaded_channel,
    effective_gain,
    random_phase_shifts,
    ue_ris_channel,
)
from .errors import (
    ConfigurationError,
    DegenerateGeometryError,
    EstimationError,
    InsufficientSoundingsError,
    InvalidDirectionError,
)
from .estimator import (
    ChannelEstimate,
    SearchGrid,
    SpectrumGrid1D,
    SpectrumGrid2D,
    build_null_system,
    estimate_channel,
    estimate_coupling,
    estimate_gain,
    estimate_ris_angles,
    estimate_theta_u,
    reconstruct_channel,
)
from .geometry import UlaConfig, UpaConfig, ula_response, ula_response_at, upa_response
from .harness import (
    ExperimentConfig,
    PointSummary,
    SweepPoint,
    SweepResult,
    TrialRecord,
    dump_spectrum,
    run_sweep,
    run_trial,
    sweep_points,
    trial_json,
    write_csv,
)
from .metrics import (
    TrialOutcome,
    frobenius_error_terms,
    nmse,
    nmse_db,
    optimal_phase_shifts,
    spectral_efficiency,
)
from .sounding import (
    PilotMatrix,
    SoundingSet,
    coarse_estimate,
    collect_soundings,
    complex_noise,
    make_pilots,
    sound,
)
from .spectra import backend_name

__version__ = "0.1.0"

__all__ = [
    "ArraySet",
    "ChannelEstimate",
    "ChannelParams",
    "ConfigurationError",
    "DegenerateGeometryError",
    "EstimationError",
    "ExperimentConfig",
    "InsufficientSoundingsError",
    "InvalidDirectionError",
    "PilotMatrix",
    "PointSummary",
    "SearchGrid",
    "SoundingSet",
    "SpectrumGrid1D",
    "SpectrumGrid2D",
    "SweepPoint",
    "SweepResult",
    "TrialOutcome",
    "TrialRecord",
    "UlaConfig",
    "UpaConfig",
    "backend_name",
    "build_null_system",
    "cascaded_channel",
    "coarse_estimate",
    "collect_soundings",
    "complex_noise",
    "dump_spectrum",
    "effective_gain",
    "estimate_channel",
    "estimate_coupling",
    "estimate_gain",
    "estimate_ris_angles",
    "estimate_theta_u",
    "frobenius_error_terms",
    "make_pilots",
    "nmse",
    "nmse_db",
    "optimal_phase_shifts",
    "random_phase_shifts",
    "reconstruct_channel",
    "run_sweep",
    "run_trial",
    "sound",
    "spectral_efficiency",
    "sweep_points",
    "trial_json",
    "ue_ris_channel",
    "ula_response",
    "ula_response_at",
    "upa_response",
    "write_csv",
]
