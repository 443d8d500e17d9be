"""Interferometric verification of a decoded qubit and the interferometer phase drift."""

from __future__ import annotations

import numpy as np

from ..statekit import BlochAngles
from .fock import FockState, apply_internal_mismatch, apply_phase, apply_two_mode_unitary, click, coincidence, route
from .params import IDEAL, CoincidenceRecord, ImperfectionParams, accidental_rate

ROUTES = {1: {"f1": "f5", "f2": "f6"}, 2: {"f4": "f5", "f2": "f6"}}
# fibers carrying the decoded qubit's |0> and |1> after routing
QUBIT_FIBERS = {1: ("f6", "f5"), 2: ("f5", "f6")}


def analyser_matrix(basis: BlochAngles) -> np.ndarray:
    """Unitary sending the basis state to D1 and its orthogonal complement to D2."""
    b0, b1 = basis.state().amplitudes
    return np.array([[np.conj(b0), np.conj(b1)], [-b1, b0]])


def analysed_state(state: FockState, which: int, basis: BlochAngles, params: ImperfectionParams = IDEAL,
                   phase_offset: float = 0.0) -> FockState:
    if which not in ROUTES:
        raise ValueError(f"which must be 1 or 2, got {which}")
    s = route(state, ROUTES[which])
    if params.mz_visibility < 1.0:
        s = apply_internal_mismatch(s, "f5", params.mz_visibility)
    if phase_offset:
        s = apply_phase(s, "f5", phase_offset)
    zero, one = QUBIT_FIBERS[which]
    return apply_two_mode_unitary(s, zero, one, analyser_matrix(basis), out_a="d1", out_b="d2")


def mz_verify(state: FockState, which: int, basis: BlochAngles, params: ImperfectionParams = IDEAL,
              pair_rate: float = 1.0, phase_offset: float = 0.0) -> CoincidenceRecord:
    """Expected D1-D3 and D2-D3 coincidence rates for an encoder output state.

    ``state`` is the unheralded encoder output (see ``encoder_output``); the
    herald condition is applied here through the coincidence with D3.
    ``phase_offset`` is added to the ``f5`` arm.
    """
    out = analysed_state(state, which, basis, params, phase_offset)
    eta = params.detector_efficiency
    s3 = pair_rate * eta * out.probability(click("f3"))
    rates = []
    for det in ("d1", "d2"):
        true = pair_rate * eta**2 * out.probability(coincidence(det, "f3"))
        sd = pair_rate * eta * out.probability(click(det))
        rates.append(true + accidental_rate(sd, s3, params))
    return CoincidenceRecord(*rates)


def fringe_coefficients(state: FockState, which: int, basis: BlochAngles, params: ImperfectionParams = IDEAL,
                        pair_rate: float = 1.0) -> np.ndarray:
    """Rates as ``A + B cos(d) + C sin(d)`` of the arm phase offset ``d``.

    Returns a ``(2, 3)`` array, rows for ``c_plus`` and ``c_minus``.  Single
    photon detection probabilities are affine in ``exp(i d)``, so three
    evaluations fix the dependence exactly.
    """
    r0, r90, r180 = (mz_verify(state, which, basis, params, pair_rate, d) for d in (0.0, np.pi / 2, np.pi))
    out = np.empty((2, 3))
    for row, attr in enumerate(("c_plus", "c_minus")):
        c0, c90, c180 = getattr(r0, attr), getattr(r90, attr), getattr(r180, attr)
        a = (c0 + c180) / 2
        out[row] = (a, (c0 - c180) / 2, c90 - a)
    return out


def phase_drift_process(duration: float, rate: float, seed=None, dt: float = 0.1, block: float | None = 5.0,
                        residual: float = 0.0, n_trials: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Random-walk phase offset sampled every ``dt`` seconds.

    Gaussian increments are scaled so the mean absolute change over one second
    equals ``rate``.  When ``block`` is set the offset is reset to a
    ``N(0, residual)`` draw at the start of every block, standing in for the
    stabilization cycle between measurement blocks.

    Returns ``(times, phases)``; ``phases`` has shape ``(n_trials, len(times))``
    when ``n_trials`` is given.
    """
    if rate < 0.0:
        raise ValueError("drift rate must be nonnegative")
    rng = np.random.default_rng(seed)
    n_steps = int(round(duration / dt))
    times = dt * np.arange(n_steps + 1)
    trials = 1 if n_trials is None else n_trials
    # E|N(0, s)| = s sqrt(2 / pi)
    step_sd = rate * np.sqrt(np.pi / 2) * np.sqrt(dt)
    steps = rng.normal(0.0, 1.0, (trials, n_steps)) * step_sd
    phases = np.empty((trials, n_steps + 1))
    per_block = None if block is None else int(round(block / dt))
    for i in range(n_steps + 1):
        if i == 0 or (per_block and i % per_block == 0):
            phases[:, i] = rng.normal(0.0, 1.0, trials) * residual if residual > 0.0 else 0.0
        else:
            phases[:, i] = phases[:, i - 1] + steps[:, i - 1]
    return times, (phases[0] if n_trials is None else phases)
