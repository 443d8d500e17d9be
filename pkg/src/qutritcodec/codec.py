"""Two qubits into one qutrit: encoding, single-qubit decoding, joint decoding.

Encoding keeps ``|00> -> |0>``, ``|01> -> |1>``, ``|11> -> |2>`` and filters out
``|10>``.  Either qubit can then be recovered without error by projecting onto
a two-level subspace, or both can be recovered approximately with
:data:`JOINT_DECODER`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .statekit import (
    DensityMatrix,
    PovmElement,
    PureState,
    QuantumOperation,
    fidelity,
    partial_trace,
    sample_bloch_amplitudes,
    design_pairs,
    BLOCH_DESIGN,
)

SQRT_HALF = 1 / np.sqrt(2)

#: Reference value of the optimal symmetric joint-retrieval fidelity, (4 + sqrt 2) / 6.
JOINT_FIDELITY = (4 + np.sqrt(2)) / 6

ENCODER = QuantumOperation.from_map({0: (0, 1.0), 1: (1, 1.0), 3: (2, 1.0)}, in_dim=4, out_dim=3)

#: ``|0> -> |00>/sqrt2``, ``|1> -> |01>``, ``|2> -> |11>/sqrt2``.
JOINT_DECODER = QuantumOperation.from_map({0: (0, SQRT_HALF), 1: (1, 1.0), 2: (3, SQRT_HALF)}, in_dim=3, out_dim=4)

# qubit -> (qutrit levels read as qubit |0>, |1>)
_SINGLE_LEVELS = {1: (1, 2), 2: (0, 1)}


def decoding_povm(which: int) -> tuple[PovmElement, PovmElement]:
    """Success and failure elements for recovering qubit ``which``."""
    lo, hi = _SINGLE_LEVELS[which]
    plus = PovmElement.projector(3, (lo, hi))
    minus = PovmElement(np.eye(3) - plus.matrix)
    return plus, minus


class EncodingError(ValueError):
    """The input can never be encoded (zero success probability)."""


@dataclass(frozen=True)
class EncodeResult:
    qutrit: PureState
    success_probability: float


@dataclass(frozen=True)
class JointDecodeResult:
    two_qubit_state: PureState
    success_probability: float
    per_qubit_states: tuple[DensityMatrix, DensityMatrix]


def _check_qubit(q: PureState, name: str):
    if q.dim != 2:
        raise ValueError(f"{name} must be a qubit, got dimension {q.dim}")
    if not q.is_normalized():
        raise ValueError(f"{name} is not normalized")


def encode(q1: PureState, q2: PureState) -> EncodeResult:
    _check_qubit(q1, "q1")
    _check_qubit(q2, "q2")
    a1, b1 = q1.amplitudes
    a2, b2 = q2.amplitudes
    v = np.array([a1 * a2, a1 * b2, b1 * b2])
    prob = float(np.vdot(v, v).real)
    if prob == 0.0:
        raise EncodingError("encoding always fails for input |1>|0>")
    return EncodeResult(PureState(v / np.sqrt(prob)), prob)


def decode_single(qutrit: PureState, which: int) -> tuple[PureState | None, float]:
    """Project onto the two levels carrying qubit ``which``.

    The success branch is relabeled into the qubit basis (levels 1, 2 for the
    first qubit, levels 0, 1 for the second).  Returns ``(None, 0.0)`` when the
    success branch is empty.
    """
    if which not in _SINGLE_LEVELS:
        raise ValueError(f"which must be 1 or 2, got {which}")
    if qutrit.dim != 3:
        raise ValueError(f"expected a qutrit, got dimension {qutrit.dim}")
    lo, hi = _SINGLE_LEVELS[which]
    v = qutrit.amplitudes[[lo, hi]]
    prob = float(np.vdot(v, v).real)
    if prob == 0.0:
        return None, 0.0
    return PureState(v / np.sqrt(prob)), prob


def decode_joint(qutrit: PureState) -> JointDecodeResult:
    if qutrit.dim != 3:
        raise ValueError(f"expected a qutrit, got dimension {qutrit.dim}")
    v = JOINT_DECODER.elements[0] @ qutrit.amplitudes
    prob = float(np.vdot(v, v).real)
    if prob == 0.0:
        raise ValueError("joint decoding has zero success probability for a nonzero qutrit")
    out = PureState(v / np.sqrt(prob))
    rho = out.density()
    return JointDecodeResult(out, prob, (partial_trace(rho, (2, 2), 1), partial_trace(rho, (2, 2), 2)))


def joint_fidelities(q1: PureState, q2: PureState) -> tuple[float, float, float]:
    """Overall success probability and per-qubit fidelities of encode followed by joint decode."""
    enc = encode(q1, q2)
    dec = decode_joint(enc.qutrit)
    f1 = fidelity(q1, dec.per_qubit_states[0])
    f2 = fidelity(q2, dec.per_qubit_states[1])
    return enc.success_probability * dec.success_probability, f1, f2


def p1_analytic(theta):
    return 0.25 + 0.5 * np.cos(theta / 2) ** 2


def f1_analytic(theta):
    c2 = np.cos(theta / 2) ** 2
    return (1 + 2 * c2**2 + (np.sqrt(2) - 1) / 2 * np.sin(theta) ** 2) / (1 + 2 * c2)


def _ratio_stderr(num: np.ndarray, den: np.ndarray) -> float:
    # delta method for sum(num) / sum(den)
    n = len(num)
    r = num.sum() / den.sum()
    resid = num - r * den
    return float(np.sqrt(np.sum(resid**2) / (n * (n - 1))) / den.mean())


def _mean_stderr(x: np.ndarray) -> float:
    return float(x.std(ddof=1) / np.sqrt(len(x)))


class PerformanceEstimate(NamedTuple):
    """Monte Carlo averages over Bloch-uniform input pairs.

    ``joint_fidelity`` is weighted by the success probability of each input;
    ``joint_fidelity_unweighted`` is the plain mean of the conditional fidelity.
    """

    single_prob_1: float
    single_prob_2: float
    joint_fidelity: float
    joint_fidelity_1: float
    joint_fidelity_2: float
    joint_fidelity_unweighted: float
    joint_prob: float
    single_prob_stderr: float
    joint_fidelity_stderr: float
    joint_prob_stderr: float
    n_samples: int

    @property
    def avg_encode_decode_prob_single(self) -> float:
        return self.single_prob_1

    @property
    def avg_joint_fidelity(self) -> float:
        return self.joint_fidelity

    @property
    def avg_joint_prob(self) -> float:
        return self.joint_prob


def sample_pairs(rng: np.random.Generator, n: int) -> np.ndarray:
    """``(n, 4)`` array of Bloch-uniform qubit pairs ``(a1, b1, a2, b2)``."""
    return np.hstack([sample_bloch_amplitudes(rng, n), sample_bloch_amplitudes(rng, n)])


def average_performance(n_samples: int, seed=None) -> PerformanceEstimate:
    if n_samples < 2:
        raise ValueError("need at least two samples")
    rng = np.random.default_rng(seed)
    q = sample_pairs(rng, n_samples)
    a1, b1, a2, b2 = q.T
    # encode probability times single-decode probability
    s1 = np.abs(b2) ** 2
    s2 = np.abs(a1) ** 2
    p, n1, n2 = kernels.decoder_stats(JOINT_DECODER.elements, q)
    f1 = n1.sum() / p.sum()
    f2 = n2.sum() / p.sum()
    nsym = (n1 + n2) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(p > 0, nsym / p, np.nan)
    return PerformanceEstimate(
        single_prob_1=float(s1.mean()),
        single_prob_2=float(s2.mean()),
        joint_fidelity=float((f1 + f2) / 2),
        joint_fidelity_1=float(f1),
        joint_fidelity_2=float(f2),
        joint_fidelity_unweighted=float(np.nanmean(cond)),
        joint_prob=float(p.mean()),
        single_prob_stderr=_mean_stderr(s1),
        joint_fidelity_stderr=_ratio_stderr(nsym, p),
        joint_prob_stderr=_mean_stderr(p),
        n_samples=n_samples,
    )


class CurvePoint(NamedTuple):
    theta: float
    p1: float
    p1_stderr: float
    f1: float
    f1_stderr: float


def first_qubit_curve(theta: float, n_samples: int, seed=None, phi: float | None = None) -> CurvePoint:
    """Monte Carlo estimate of success probability and fidelity for a fixed first-qubit polar angle.

    The azimuth of the first qubit is drawn uniformly unless ``phi`` is fixed;
    the second qubit is Bloch-uniform.
    """
    rng = np.random.default_rng(seed)
    phis = rng.uniform(0.0, 2 * np.pi, n_samples) if phi is None else np.full(n_samples, phi)
    q1 = np.stack([np.full(n_samples, np.cos(theta / 2)) + 0j, np.exp(1j * phis) * np.sin(theta / 2)], axis=1)
    q = np.hstack([q1, sample_bloch_amplitudes(rng, n_samples)])
    p, n1, _ = kernels.decoder_stats(JOINT_DECODER.elements, q)
    return CurvePoint(theta, float(p.mean()), _mean_stderr(p), float(n1.sum() / p.sum()), _ratio_stderr(n1, p))


def first_qubit_curve_exact(theta: float, phi: float = 0.0) -> tuple[float, float]:
    """Average over the second qubit by exact design quadrature; returns ``(P1, F1)``."""
    q1 = PureState.from_bloch(theta, phi).amplitudes
    q = np.hstack([np.tile(q1, (len(BLOCH_DESIGN), 1)), BLOCH_DESIGN])
    p, n1, _ = kernels.decoder_stats(JOINT_DECODER.elements, q)
    return float(p.mean()), float(n1.sum() / p.sum())


def exact_joint_performance(op: QuantumOperation = JOINT_DECODER) -> tuple[float, float, float]:
    """Exact Bloch averages ``(F1, F2, P)`` of a 3 -> 4 decoder via design quadrature."""
    p, n1, n2 = kernels.decoder_stats(op.elements, design_pairs())
    return float(n1.sum() / p.sum()), float(n2.sum() / p.sum()), float(p.mean())
