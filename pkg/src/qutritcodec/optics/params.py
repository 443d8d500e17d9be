"""Imperfection model of the fiber setup and detector records."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields


@dataclass(frozen=True)
class ImperfectionParams:
    """Non-ideal features of the setup.

    mode_overlap
        ``|<a|b>|^2`` of the two photons' internal states at the variable-ratio
        coupler (1 = indistinguishable).  Scales two-photon interference.
    mz_visibility
        Internal-state overlap amplitude between the two arms of the
        verification interferometer; bounds its single-photon fringe visibility.
    phase_drift_rate
        Mean absolute phase change per second of the interferometer, rad/s.
    stabilization_residual
        Standard deviation of the phase left after each stabilization cycle, rad.
    detector_efficiency, dark_count_rate, coincidence_window
        Identical for all detectors; rate in 1/s, window in s.
    coherence_time
        Width ``sigma`` of the Gaussian temporal overlap ``exp(-tau^2 / 2 sigma^2)``, s.
    """

    mode_overlap: float = 1.0
    mz_visibility: float = 1.0
    phase_drift_rate: float = 0.0
    stabilization_residual: float = 0.0
    detector_efficiency: float = 1.0
    dark_count_rate: float = 0.0
    coincidence_window: float = 2e-9
    coherence_time: float = 150e-15

    def __post_init__(self):
        for name in ("mode_overlap", "mz_visibility", "detector_efficiency"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        for name in ("phase_drift_rate", "stabilization_residual", "dark_count_rate", "coincidence_window"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")
        if self.coherence_time <= 0.0:
            raise ValueError("coherence_time must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "ImperfectionParams":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown imperfection keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})

    def to_dict(self) -> dict:
        return asdict(self)


IDEAL = ImperfectionParams()


@dataclass(frozen=True)
class CoincidenceRecord:
    """Expected coincidence rates D1-D3 (``c_plus``) and D2-D3 (``c_minus``) in 1/s."""

    c_plus: float
    c_minus: float

    def __post_init__(self):
        if self.c_plus < 0.0 or self.c_minus < 0.0:
            raise ValueError("coincidence rates must be nonnegative")

    @property
    def fidelity(self) -> float:
        total = self.c_plus + self.c_minus
        if total == 0.0:
            raise ZeroDivisionError("no coincidences")
        return self.c_plus / total


def accidental_rate(singles_x: float, singles_y: float, params: ImperfectionParams) -> float:
    """Dark counts of one detector coinciding with true detections of the other."""
    return params.coincidence_window * params.dark_count_rate * (singles_x + singles_y)
