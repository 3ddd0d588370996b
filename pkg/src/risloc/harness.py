"""Seeded Monte-Carlo runner: sweeps, per-trial records, CSV and grid dumps.

Determinism contract: all randomness in a trial derives from a seed sequence
keyed by (base seed, sweep-point index, trial index), with one child stream
for the scenario draw and one per sounding block for noise.  Results are
therefore identical across worker counts and execution orders, and adding
sweep points never perturbs existing ones.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from .channel import ArraySet, ChannelParams, cascaded_channel, random_phase_shifts
from .errors import ConfigurationError, EstimationError
from .estimator import SearchGrid, estimate_channel, estimate_gain, reconstruct_channel
from .geometry import UlaConfig, UpaConfig
from .metrics import TrialOutcome, frobenius_error_terms, nmse, nmse_db, spectral_efficiency
from .sounding import collect_soundings, make_pilots

CSV_COLUMNS = (
    "snr_db",
    "L",
    "n_x",
    "n_y",
    "trials",
    "failures",
    "nmse_db_proposed",
    "nmse_db_oracle",
    "se_proposed",
    "se_oracle",
    "theta_err_deg",
    "phi_err_deg",
    "psi_err_deg",
    "gain_err_rel",
    "seed",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """All experiment knobs; the defaults are the reference uplink scenario.

    Angles are degrees here (converted to radians internally).  snr_db,
    n_blocks, and ris_sizes are swept jointly as a Cartesian product; each
    combination is one sweep point.  The per-trial path gain has unit modulus
    and a phase drawn uniformly per trial.
    """

    theta_u_deg: float = 40.0
    theta_b_deg: float = 40.0
    phi_u_deg: float = 50.0
    psi_u_deg: float = 30.0
    phi_b_deg: float = 50.0
    psi_b_deg: float = 65.0
    n_ue: int = 8
    n_bs: int = 12
    ris_sizes: tuple = ((16, 16),)
    ula_spacing: float = 0.5
    ris_spacing: float = 0.2
    snr_db: tuple = (-10.0,)
    n_blocks: tuple = (5,)
    trials: int = 200
    seed: int = 0
    noise: bool = True
    ref_policy: str = "first"
    workers: int = 1
    grid: SearchGrid = SearchGrid()

    def __post_init__(self) -> None:
        object.__setattr__(self, "ris_sizes", tuple(tuple(int(v) for v in s) for s in self.ris_sizes))
        object.__setattr__(self, "snr_db", tuple(float(v) for v in self.snr_db))
        object.__setattr__(self, "n_blocks", tuple(int(v) for v in self.n_blocks))
        if self.trials < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        if not self.snr_db:
            raise ConfigurationError("snr_db must be a nonempty list")
        if not self.n_blocks or any(l < 2 for l in self.n_blocks):
            raise ConfigurationError("n_blocks entries must all be >= 2")
        if not self.ris_sizes or any(len(s) != 2 or s[0] < 1 or s[1] < 1 for s in self.ris_sizes):
            raise ConfigurationError("ris_sizes entries must be [n_x, n_y] pairs of positive ints")
        if self.ref_policy not in ("first", "strongest"):
            raise ConfigurationError(f"ref_policy must be 'first' or 'strongest', got {self.ref_policy!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "grid" in kwargs and not isinstance(kwargs["grid"], SearchGrid):
            grid_data = kwargs["grid"]
            grid_known = {f.name for f in fields(SearchGrid)}
            grid_unknown = set(grid_data) - grid_known
            if grid_unknown:
                raise ConfigurationError(f"unknown grid keys: {sorted(grid_unknown)}")
            kwargs["grid"] = SearchGrid(**grid_data)
        return cls(**kwargs)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigurationError(f"config {path} must hold a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name == "grid":
                value = {g.name: getattr(value, g.name) for g in fields(SearchGrid)}
            elif f.name == "ris_sizes":
                value = [list(s) for s in value]
            elif isinstance(value, tuple):
                value = list(value)
            out[f.name] = value
        return out

    def arrays(self, ris_size) -> ArraySet:
        """Aperture set for one sweep point's surface size."""
        return ArraySet(
            bs=UlaConfig(self.n_bs, self.ula_spacing),
            ue=UlaConfig(self.n_ue, self.ula_spacing),
            ris=UpaConfig(int(ris_size[0]), int(ris_size[1]), self.ris_spacing),
        )

    def scenario(self, gain: complex = 1.0 + 0.0j) -> ChannelParams:
        """Channel parameters for this config's angles, radians inside."""
        d = np.deg2rad
        return ChannelParams(
            theta_u=float(d(self.theta_u_deg)),
            theta_b=float(d(self.theta_b_deg)),
            phi_u=float(d(self.phi_u_deg)),
            psi_u=float(d(self.psi_u_deg)),
            phi_b=float(d(self.phi_b_deg)),
            psi_b=float(d(self.psi_b_deg)),
            gain=complex(gain),
        )


@dataclass(frozen=True)
class SweepPoint:
    """One (SNR, block count, surface size) combination in the sweep."""

    index: int
    snr_db: float
    n_blocks: int
    ris_size: tuple

    @property
    def power(self) -> float:
        return float(10.0 ** (self.snr_db / 10.0))


def sweep_points(cfg: ExperimentConfig) -> list[SweepPoint]:
    """Cartesian sweep order: SNR outermost, then block count, then size."""
    points = []
    for snr in cfg.snr_db:
        for n_blocks in cfg.n_blocks:
            for size in cfg.ris_sizes:
                points.append(
                    SweepPoint(
                        index=len(points),
                        snr_db=float(snr),
                        n_blocks=int(n_blocks),
                        ris_size=tuple(size),
                    )
                )
    return points


@dataclass(frozen=True)
class TrialRecord:
    """One Monte-Carlo draw: both methods' outcomes, or a failure marker."""

    proposed: TrialOutcome | None
    oracle: TrialOutcome | None
    theta_u_hat_deg: float | None = None
    phi_u_hat_deg: float | None = None
    psi_u_hat_deg: float | None = None
    gain_hat: complex | None = None
    failed: bool = False
    reason: str = ""


def _trial_streams(seed: int, point_index: int, trial_index: int, n_blocks: int):
    root = np.random.SeedSequence(entropy=seed, spawn_key=(point_index, trial_index))
    children = root.spawn(n_blocks + 1)
    scenario_rng = np.random.default_rng(children[0])
    noise_rngs = [np.random.default_rng(c) for c in children[1:]]
    return scenario_rng, noise_rngs


def _draw_scenario(cfg: ExperimentConfig, point: SweepPoint, trial_index: int):
    """Everything random in one trial, in a fixed draw order."""
    arrays = cfg.arrays(point.ris_size)
    scenario_rng, noise_rngs = _trial_streams(cfg.seed, point.index, trial_index, point.n_blocks)
    gain = np.exp(1j * scenario_rng.uniform(0.0, 2.0 * np.pi))
    params = cfg.scenario(gain=complex(gain))
    omegas = np.stack(
        [random_phase_shifts(scenario_rng, arrays.ris.n_elements) for _ in range(point.n_blocks)]
    )
    pilots = make_pilots(cfg.n_ue, point.power)
    soundings = collect_soundings(
        params, omegas, pilots, arrays, noise_rngs if cfg.noise else None
    )
    return params, arrays, omegas, soundings


def run_trial(cfg: ExperimentConfig, point: SweepPoint, trial_index: int) -> TrialRecord:
    """One seeded draw: sounding, both estimators, per-trial metrics."""
    params, arrays, omegas, soundings = _draw_scenario(cfg, point, trial_index)
    power = point.power
    h_true = cascaded_channel(params, omegas[-1], arrays)
    try:
        est = estimate_channel(
            soundings, params.theta_b, params.phi_b, params.psi_b, arrays,
            grid=cfg.grid, ref_policy=cfg.ref_policy,
        )
        gain_oracle = estimate_gain(
            soundings.coarse, omegas,
            params.theta_b, params.phi_b, params.psi_b,
            params.theta_u, params.phi_u, params.psi_u,
            arrays,
        )
    except EstimationError as exc:
        return TrialRecord(proposed=None, oracle=None, failed=True, reason=str(exc))

    h_hat = reconstruct_channel(est, omegas[-1], params.theta_b, params.phi_b, params.psi_b, arrays)
    num, den = frobenius_error_terms(h_hat, h_true)
    se = spectral_efficiency(params, arrays, power, est.theta_u_hat, est.phi_u_hat, est.psi_u_hat)
    proposed = TrialOutcome(
        nmse_num=num,
        nmse_den=den,
        se_bits=se,
        theta_err_deg=abs(float(np.rad2deg(est.theta_u_hat - params.theta_u))),
        phi_err_deg=abs(float(np.rad2deg(est.phi_u_hat - params.phi_u))),
        psi_err_deg=abs(float(np.rad2deg(est.psi_u_hat - params.psi_u))),
        gain_err_rel=abs(est.gain_hat - params.gain) / abs(params.gain),
    )

    h_oracle = cascaded_channel(replace(params, gain=gain_oracle), omegas[-1], arrays)
    num_o, den_o = frobenius_error_terms(h_oracle, h_true)
    se_o = spectral_efficiency(params, arrays, power, params.theta_u, params.phi_u, params.psi_u)
    oracle = TrialOutcome(
        nmse_num=num_o,
        nmse_den=den_o,
        se_bits=se_o,
        theta_err_deg=0.0,
        phi_err_deg=0.0,
        psi_err_deg=0.0,
        gain_err_rel=abs(gain_oracle - params.gain) / abs(params.gain),
    )
    return TrialRecord(
        proposed=proposed,
        oracle=oracle,
        theta_u_hat_deg=float(np.rad2deg(est.theta_u_hat)),
        phi_u_hat_deg=float(np.rad2deg(est.phi_u_hat)),
        psi_u_hat_deg=float(np.rad2deg(est.psi_u_hat)),
        gain_hat=complex(est.gain_hat),
    )


def _trial_worker(args) -> TrialRecord:
    cfg, point, trial_index = args
    return run_trial(cfg, point, trial_index)


@dataclass(frozen=True)
class PointSummary:
    """Aggregates for one sweep point, reduced in trial-index order."""

    snr_db: float
    n_blocks: int
    n_x: int
    n_y: int
    trials: int
    failures: int
    nmse_db_proposed: float
    nmse_db_oracle: float
    se_proposed: float
    se_oracle: float
    theta_err_deg: float
    phi_err_deg: float
    psi_err_deg: float
    gain_err_rel: float
    seed: int
    wall_time_s: float


@dataclass(frozen=True)
class SweepResult:
    """All point summaries of one sweep, plus the config that produced them."""

    config: ExperimentConfig
    points: tuple


def run_point(cfg: ExperimentConfig, point: SweepPoint) -> PointSummary:
    """All trials of one sweep point, optionally across worker processes."""
    start = time.perf_counter()
    tasks = [(cfg, point, i) for i in range(cfg.trials)]
    if cfg.workers > 1:
        chunk = max(1, cfg.trials // (4 * cfg.workers))
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = list(pool.map(_trial_worker, tasks, chunksize=chunk))
    else:
        records = [run_trial(cfg, point, i) for i in range(cfg.trials)]
    ok = [r for r in records if not r.failed]
    failures = len(records) - len(ok)

    if ok:
        proposed = [r.proposed for r in ok]
        oracle = [r.oracle for r in ok]
        summary = dict(
            nmse_db_proposed=nmse_db(nmse(proposed)),
            nmse_db_oracle=nmse_db(nmse(oracle)),
            se_proposed=float(np.mean([o.se_bits for o in proposed])),
            se_oracle=float(np.mean([o.se_bits for o in oracle])),
            theta_err_deg=float(np.mean([o.theta_err_deg for o in proposed])),
            phi_err_deg=float(np.mean([o.phi_err_deg for o in proposed])),
            psi_err_deg=float(np.mean([o.psi_err_deg for o in proposed])),
            gain_err_rel=float(np.mean([o.gain_err_rel for o in proposed])),
        )
    else:
        nan = float("nan")
        summary = dict(
            nmse_db_proposed=nan, nmse_db_oracle=nan, se_proposed=nan, se_oracle=nan,
            theta_err_deg=nan, phi_err_deg=nan, psi_err_deg=nan, gain_err_rel=nan,
        )
    return PointSummary(
        snr_db=point.snr_db,
        n_blocks=point.n_blocks,
        n_x=point.ris_size[0],
        n_y=point.ris_size[1],
        trials=cfg.trials,
        failures=failures,
        seed=cfg.seed,
        wall_time_s=time.perf_counter() - start,
        **summary,
    )


def run_sweep(cfg: ExperimentConfig, progress=None) -> SweepResult:
    """All sweep points in order; progress is an optional per-point callback."""
    summaries = []
    points = sweep_points(cfg)
    for point in points:
        summary = run_point(cfg, point)
        summaries.append(summary)
        if progress is not None:
            progress(point, summary, len(points))
    return SweepResult(config=cfg, points=tuple(summaries))


def _format_value(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.10g}"


def write_csv(result: SweepResult, path) -> None:
    """Write a sweep result with the config embedded in comment lines.

    Output is byte-stable: fixed float formatting, sorted config keys, no
    timestamps.
    """
    config = result.config.to_dict()
    # worker count is an execution knob that cannot affect the data, so it
    # stays out of the reproducibility record
    del config["workers"]
    lines = [
        "# risloc sweep v1",
        "# config: " + json.dumps(config, sort_keys=True, separators=(",", ":")),
        ",".join(CSV_COLUMNS),
    ]
    for p in result.points:
        row = (
            p.snr_db, p.n_blocks, p.n_x, p.n_y, p.trials, p.failures,
            p.nmse_db_proposed, p.nmse_db_oracle, p.se_proposed, p.se_oracle,
            p.theta_err_deg, p.phi_err_deg, p.psi_err_deg, p.gain_err_rel, p.seed,
        )
        lines.append(",".join(_format_value(v) for v in row))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise ConfigurationError(f"cannot write CSV {path}: {exc}") from exc


def dump_spectrum(cfg: ExperimentConfig, path, point_index: int = 0, trial_index: int = 0):
    """Write the coarse 2D pseudo-spectrum of one seeded trial as a text grid.

    Layout: first row is the psi axis in degrees (top-left corner cell 0),
    first column the phi axis in degrees, body the spectrum values.
    """
    points = sweep_points(cfg)
    if not 0 <= point_index < len(points):
        raise ConfigurationError(f"point_index {point_index} out of range for {len(points)} points")
    point = points[point_index]
    params, arrays, _, soundings = _draw_scenario(cfg, point, trial_index)
    est = estimate_channel(
        soundings, params.theta_b, params.phi_b, params.psi_b, arrays,
        grid=cfg.grid, ref_policy=cfg.ref_policy,
    )
    grid = est.ris_spectrum
    block = np.zeros((len(grid.phi_axis) + 1, len(grid.psi_axis) + 1))
    block[0, 1:] = np.rad2deg(grid.psi_axis)
    block[1:, 0] = np.rad2deg(grid.phi_axis)
    block[1:, 1:] = grid.values
    try:
        np.savetxt(path, block, fmt="%.9g")
    except OSError as exc:
        raise ConfigurationError(f"cannot write spectrum grid {path}: {exc}") from exc
    return est


def trial_json(cfg: ExperimentConfig, point_index: int = 0, trial_index: int = 0) -> dict:
    """One trial as a flat JSON-ready record (angles and errors in degrees)."""
    points = sweep_points(cfg)
    if not 0 <= point_index < len(points):
        raise ConfigurationError(f"point_index {point_index} out of range for {len(points)} points")
    point = points[point_index]
    record = run_trial(cfg, point, trial_index)
    out = {
        "snr_db": point.snr_db,
        "L": point.n_blocks,
        "n_x": point.ris_size[0],
        "n_y": point.ris_size[1],
        "trial": trial_index,
        "seed": cfg.seed,
        "failed": record.failed,
    }
    if record.failed:
        out["reason"] = record.reason
        return out
    p, o = record.proposed, record.oracle
    out.update(
        {
            "theta_u_deg": record.theta_u_hat_deg,
            "phi_u_deg": record.phi_u_hat_deg,
            "psi_u_deg": record.psi_u_hat_deg,
            "gain_re": record.gain_hat.real,
            "gain_im": record.gain_hat.imag,
            "theta_err_deg": p.theta_err_deg,
            "phi_err_deg": p.phi_err_deg,
            "psi_err_deg": p.psi_err_deg,
            "gain_err_rel": p.gain_err_rel,
            "nmse_db": nmse_db(p.nmse_num / p.nmse_den),
            "nmse_db_oracle": nmse_db(o.nmse_num / o.nmse_den),
            "se_bits": p.se_bits,
            "se_bits_oracle": o.se_bits,
        }
    )
    return out
