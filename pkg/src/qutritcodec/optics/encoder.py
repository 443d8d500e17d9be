"""Linear-optical encoder: two dual-rail photons, a variable-ratio coupler and a herald.

Qubit 1 is a photon in fibers ``f2`` (``|0>``) and ``f1`` (``|1>``); qubit 2 a
photon in ``f4`` (``|0>``) and ``f3`` (``|1>``).  The coupler mixes ``f2`` and
``f3``; a click in ``f3`` heralds a qutrit carried by the remaining photon in
``f4``, ``f2``, ``f1`` (levels 0, 1, 2).
"""

from __future__ import annotations

from math import sqrt

import numpy as np

from ..statekit import BlochAngles, DensityMatrix, PureState
from .fock import CouplerSpec, FockState, apply_attenuator, apply_coupler, apply_phase, fiber_of, internal_of
from .params import IDEAL, ImperfectionParams

QUBIT_RAILS = {1: ("f2", "f1"), 2: ("f4", "f3")}
QUTRIT_FIBERS = ("f4", "f2", "f1")
HERALD = "f3"

_FEASIBILITY_TOL = 1e-12


class BalancedCouplerError(ValueError):
    """Filtering is impossible when the coupler is balanced."""


def damping_factors(reflectance: float) -> tuple[float, float]:
    """Transmissions ``(eta_1, eta_4)`` that equalize the heralded amplitudes.

    Values above one mean the filter is not realizable at this ratio.
    """
    r = reflectance
    t = 1.0 - r
    return (r - t) ** 2 / r, (r - t) ** 2 / t


def encoding_success_probability(reflectance: float, q1: PureState, q2: PureState) -> float:
    """Closed-form heralded success probability with filters, ``(T - R)^2 (1 - |b1|^2 |a2|^2)``."""
    r = reflectance
    t = 1.0 - r
    return (t - r) ** 2 * (1.0 - abs(q1[1]) ** 2 * abs(q2[0]) ** 2)


def preparation_efficiency(angles: BlochAngles) -> float:
    """Survival probability of the conditional preparation.

    A balanced fiber coupler splits the photon and an attenuator on the arm
    that must carry less weight sets the amplitude ratio.
    """
    c2 = np.cos(angles.theta / 2) ** 2
    return float(1.0 / (2.0 * max(c2, 1.0 - c2)))


def compensation_phases(reflectance: float) -> dict[str, float]:
    """Phases on ``f4`` and ``f2`` that make the heralded amplitudes real and positive.

    The transmitted term picks up ``i`` and the two-photon term carries the
    sign of ``R - T``.
    """
    r = reflectance
    return {"f4": -np.pi / 2, "f2": np.pi if r < 1.0 - r else 0.0}


def photon_modes(state: PureState, rails: tuple[str, str], overlap: float = 1.0) -> dict[str, complex]:
    """Creation-operator amplitudes of a dual-rail photon.

    ``overlap`` is ``|<ref|internal>|^2``; the remaining weight goes to the
    orthogonal internal state ``'``.
    """
    a, b = state.amplitudes
    o, o_perp = sqrt(overlap), sqrt(1.0 - overlap)
    modes = {rails[0]: a * o, rails[1]: b * o}
    if o_perp > 0.0:
        modes.update({rails[0] + "'": a * o_perp, rails[1] + "'": b * o_perp})
    return modes


def temporal_overlap(delay: float, params: ImperfectionParams) -> float:
    return params.mode_overlap * float(np.exp(-(delay**2) / (2 * params.coherence_time**2)))


def input_state(q1: PureState, q2: PureState, overlap: float = 1.0) -> FockState:
    """Photon pair with the second photon's internal state overlapping the first by ``overlap``."""
    return FockState.from_photons([photon_modes(q1, QUBIT_RAILS[1]), photon_modes(q2, QUBIT_RAILS[2], overlap)])


def encoder_output(q1: PureState, q2: PureState, reflectance: float, params: ImperfectionParams = IDEAL,
                   apply_filters: bool = True, compensate: bool = True, delay: float = 0.0) -> FockState:
    """Full two-photon output state of the encoder, before any detection."""
    if not 0.0 < reflectance < 1.0:
        raise ValueError(f"reflectance must lie in (0, 1), got {reflectance}")
    state = input_state(q1, q2, temporal_overlap(delay, params))
    state = apply_coupler(state, CouplerSpec("f2", "f3", reflectance))
    if apply_filters:
        if reflectance == 0.5:
            raise BalancedCouplerError("balanced coupler cannot encode")
        eta1, eta4 = damping_factors(reflectance)
        if max(eta1, eta4) > 1.0 + _FEASIBILITY_TOL:
            raise ValueError(f"damping factors {eta1:.4g}, {eta4:.4g} exceed 1 at R={reflectance}")
        state = apply_attenuator(state, "f1", min(eta1, 1.0))
        state = apply_attenuator(state, "f4", min(eta4, 1.0))
    if compensate:
        for fiber, phase in compensation_phases(reflectance).items():
            if phase:
                state = apply_phase(state, fiber, phase)
    return state


def heralded(state: FockState) -> FockState:
    """Terms with exactly one photon in the herald and one in the qutrit fibers."""
    return state.select(
        lambda occ: occ.in_fiber(HERALD) == 1 and sum(occ.in_fiber(f) for f in QUTRIT_FIBERS) == 1 and occ.total == 2
    )


def _qutrit_branches(state: FockState):
    """Yield ``(level, environment, amplitude)`` for every heralded term."""
    for occ, c in heralded(state).items():
        herald_tag = qutrit_tag = None
        level = None
        for m in occ.modes():
            f = fiber_of(m)
            if f == HERALD:
                herald_tag = internal_of(m)
            else:
                level = QUTRIT_FIBERS.index(f)
                qutrit_tag = internal_of(m)
        yield level, (herald_tag, qutrit_tag), c


def qutrit_density(state: FockState) -> tuple[DensityMatrix, float]:
    """Path-qutrit density matrix of the heralded branch, internal states traced out.

    Returns the normalized matrix and the heralding probability.
    """
    by_env: dict[tuple, np.ndarray] = {}
    for level, env, c in _qutrit_branches(state):
        by_env.setdefault(env, np.zeros(3, dtype=complex))[level] += c
    rho = np.zeros((3, 3), dtype=complex)
    for v in by_env.values():
        rho += np.outer(v, v.conj())
    p = float(np.trace(rho).real)
    if p == 0.0:
        raise ValueError("heralded branch is empty")
    return DensityMatrix(rho / p), p


def simulate_encoding(q1: BlochAngles, q2: BlochAngles, reflectance: float, apply_filters: bool = True,
                      compensate: bool = True) -> tuple[PureState | None, float]:
    """Ideal heralded qutrit and its success probability.

    Without filters (or compensation) the returned amplitudes carry the raw
    ``(i sqrt(T), R - T, sqrt(R))`` weights.  Returns ``(None, 0.0)`` when the
    herald can never fire in the right pattern.
    """
    state = encoder_output(q1.state(), q2.state(), reflectance, IDEAL, apply_filters, compensate)
    amps = np.zeros(3, dtype=complex)
    for level, env, c in _qutrit_branches(state):
        if env != ("", ""):
            raise ValueError("ideal simulation produced distinguishable photons")
        amps[level] += c
    p = float(np.vdot(amps, amps).real)
    if p == 0.0:
        return None, 0.0
    return PureState(amps / np.sqrt(p)), p


def optimal_splitting_ratio(grid_resolution: float = 1e-4) -> float:
    """Reflectance in ``(0, 1/2)`` maximizing ``(T - R)^2`` with both damping factors at most one."""
    n = int(round(0.5 / grid_resolution))
    r = np.arange(1, n) / n * 0.5
    eta1, eta4 = damping_factors(r)
    feasible = (eta1 <= 1.0 + _FEASIBILITY_TOL) & (eta4 <= 1.0 + _FEASIBILITY_TOL)
    if not feasible.any():
        raise ValueError("no feasible ratio on the grid")
    objective = np.where(feasible, (1.0 - 2.0 * r) ** 2, -np.inf)
    return float(r[np.argmax(objective)])
