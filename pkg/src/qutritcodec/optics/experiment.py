"""Fidelity sweeps over prepared input states under an imperfection model."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from ..statekit import BlochAngles
from .encoder import encoder_output, heralded, preparation_efficiency
from .params import ImperfectionParams
from .verification import fringe_coefficients, phase_drift_process

SCHEMA_VERSION = 1
MODES = ("expected", "shot-noise")

ROW_COLUMNS = (
    "qubit",
    "theta1_deg",
    "phi1_deg",
    "theta2_deg",
    "phi2_deg",
    "fidelity",
    "success_probability",
    "c_plus",
    "c_minus",
    "counts_plus",
    "counts_minus",
)


class ConfigError(ValueError):
    pass


def _degrees_list(value) -> list[float]:
    if isinstance(value, dict):
        unknown = set(value) - {"start", "stop", "step"}
        if unknown:
            raise ConfigError(f"unknown range keys {sorted(unknown)}")
        start, stop, step = float(value["start"]), float(value["stop"]), float(value["step"])
        if step <= 0 or stop < start:
            raise ConfigError("range needs step > 0 and stop >= start")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [start + k * step for k in range(n)]
    if isinstance(value, (int, float)):
        return [float(value)]
    return [float(v) for v in value]


@dataclass(frozen=True)
class Sweep:
    """Verified qubit, its polar angle and the list of azimuths, all in degrees."""

    qubit: int
    theta: float
    phis: tuple[float, ...]

    def __post_init__(self):
        if self.qubit not in (1, 2):
            raise ConfigError(f"qubit must be 1 or 2, got {self.qubit}")
        if not 0.0 <= self.theta <= 180.0:
            raise ConfigError(f"theta must lie in [0, 180] degrees, got {self.theta}")
        if not self.phis or any(not 0.0 <= p < 360.0 for p in self.phis):
            raise ConfigError("phi values must lie in [0, 360) degrees")

    @classmethod
    def from_dict(cls, data: dict) -> "Sweep":
        unknown = set(data) - {"qubit", "theta", "phi"}
        if unknown:
            raise ConfigError(f"unknown sweep keys {sorted(unknown)}")
        return cls(int(data["qubit"]), float(data["theta"]), tuple(_degrees_list(data["phi"])))

    def to_dict(self) -> dict:
        return {"qubit": self.qubit, "theta": self.theta, "phi": list(self.phis)}


def default_sweeps() -> tuple[Sweep, ...]:
    """38 states of qubit 1 and 57 of qubit 2, azimuth 0..180 in 10 degree steps."""
    phis = tuple(float(p) for p in range(0, 181, 10))
    return tuple(Sweep(1, t, phis) for t in (90.0, 78.46)) + tuple(Sweep(2, t, phis) for t in (90.0, 78.46, 70.53))


@dataclass(frozen=True)
class ExperimentConfig:
    reflectance: float = 0.25
    mode: str = "expected"
    seed: int = 0
    pair_rate: float = 5000.0
    blocks: int = 10
    block_seconds: float = 5.0
    drift_step: float = 0.1
    spectator: tuple[float, float] = (90.0, 0.0)
    imperfections: ImperfectionParams = field(default_factory=ImperfectionParams)
    sweeps: tuple[Sweep, ...] = field(default_factory=default_sweeps)

    def __post_init__(self):
        if not 0.0 < self.reflectance < 0.5:
            raise ConfigError(f"reflectance must lie in (0, 0.5), got {self.reflectance}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.pair_rate <= 0 or self.blocks < 1 or self.block_seconds <= 0 or self.drift_step <= 0:
            raise ConfigError("pair_rate, blocks, block_seconds and drift_step must be positive")
        if self.drift_step > self.block_seconds:
            raise ConfigError("drift_step must not exceed block_seconds")
        t, p = self.spectator
        if not (0.0 <= t <= 180.0 and 0.0 <= p < 360.0):
            raise ConfigError("spectator angles out of range")
        if not self.sweeps:
            raise ConfigError("at least one sweep is required")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        version = data.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version}")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        kw = {}
        try:
            for k in ("reflectance", "pair_rate", "block_seconds", "drift_step"):
                if k in data:
                    kw[k] = float(data[k])
            for k in ("seed", "blocks"):
                if k in data:
                    if isinstance(data[k], bool) or int(data[k]) != data[k]:
                        raise ConfigError(f"{k} must be an integer")
                    kw[k] = int(data[k])
            if "mode" in data:
                kw["mode"] = str(data["mode"])
            if "spectator" in data:
                sp = data["spectator"]
                if set(sp) - {"theta", "phi"}:
                    raise ConfigError("spectator takes only theta and phi")
                kw["spectator"] = (float(sp["theta"]), float(sp["phi"]))
            if "imperfections" in data:
                kw["imperfections"] = ImperfectionParams.from_dict(data["imperfections"])
            if "sweeps" in data:
                kw["sweeps"] = tuple(Sweep.from_dict(s) for s in data["sweeps"])
            return cls(**kw)
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "reflectance": self.reflectance,
            "mode": self.mode,
            "seed": self.seed,
            "pair_rate": self.pair_rate,
            "blocks": self.blocks,
            "block_seconds": self.block_seconds,
            "drift_step": self.drift_step,
            "spectator": {"theta": self.spectator[0], "phi": self.spectator[1]},
            "imperfections": self.imperfections.to_dict(),
            "sweeps": [s.to_dict() for s in self.sweeps],
        }

    def dump(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")


def grid_points(config: ExperimentConfig):
    """Yield ``(qubit, angles of qubit 1, angles of qubit 2)`` in degrees, in output order."""
    for sweep in config.sweeps:
        for phi in sweep.phis:
            target = (sweep.theta, phi)
            if sweep.qubit == 1:
                yield 1, target, config.spectator
            else:
                yield 2, config.spectator, target


def run_point(config: ExperimentConfig, qubit: int, deg1, deg2, rng: np.random.Generator) -> dict:
    params = config.imperfections
    a1, a2 = BlochAngles.from_degrees(*deg1), BlochAngles.from_degrees(*deg2)
    state = encoder_output(a1.state(), a2.state(), config.reflectance, params)
    basis = a1 if qubit == 1 else a2
    rate = config.pair_rate * preparation_efficiency(a1) * preparation_efficiency(a2)
    coeffs = fringe_coefficients(state, qubit, basis, params, rate)

    _, phases = phase_drift_process(
        config.block_seconds, params.phase_drift_rate, rng, dt=config.drift_step, block=None,
        residual=params.stabilization_residual, n_trials=config.blocks,
    )
    # drop the endpoint so each block covers [0, block_seconds)
    phases = phases[:, :-1]
    basis_fn = np.stack([np.ones_like(phases), np.cos(phases), np.sin(phases)])
    block_rates = np.einsum("rk,kbt->rbt", coeffs, basis_fn).mean(axis=2)
    block_rates = np.clip(block_rates, 0.0, None)
    expected = block_rates.mean(axis=1)

    if config.mode == "shot-noise":
        counts = rng.poisson(block_rates * config.block_seconds).sum(axis=1).astype(float)
    else:
        counts = block_rates.sum(axis=1) * config.block_seconds
    total = counts.sum()
    fid = counts[0] / total if total > 0 else float("nan")

    # ideal-detector probability that the herald fires and the decoded photon reaches D1 or D2
    p_success = heralded(state).probability(lambda occ: any(occ.in_fiber(f) for f in _decode_fibers(qubit)))
    return {
        "qubit": qubit,
        "theta1_deg": deg1[0],
        "phi1_deg": deg1[1],
        "theta2_deg": deg2[0],
        "phi2_deg": deg2[1],
        "fidelity": float(fid),
        "success_probability": float(p_success),
        "c_plus": float(expected[0]),
        "c_minus": float(expected[1]),
        "counts_plus": float(counts[0]),
        "counts_minus": float(counts[1]),
    }


def _decode_fibers(qubit: int) -> tuple[str, str]:
    return ("f1", "f2") if qubit == 1 else ("f2", "f4")


def _run_job(job) -> dict:
    config, (q, d1, d2), seed = job
    return run_point(config, q, d1, d2, np.random.default_rng(seed))


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[dict]:
    """One row per grid point, deterministic for a given config and seed.

    Each point draws from its own spawned seed, so the rows do not depend on
    ``workers`` or on scheduling order.
    """
    points = list(grid_points(config))
    seeds = np.random.SeedSequence(config.seed).spawn(len(points))
    jobs = [(config, pt, s) for pt, s in zip(points, seeds)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_job, jobs, chunksize=8))
    return [_run_job(j) for j in jobs]
