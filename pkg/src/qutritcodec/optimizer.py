"""Numerical search over probabilistic qutrit-to-two-qubit decoders.

Candidates are stacks of up to four 4x3 operation elements built from an
unconstrained real vector and rescaled so the largest eigenvalue of
``sum K^dag K`` is one.  The weighted average fidelity is invariant under a
global rescaling, so this only fixes the success probability at its maximum
for the given shape.

Objective averages use the 6 x 6 octahedron design pairs.  Fidelities are
quadratic in each input projector, which the design integrates exactly, so
the objective is the true Bloch average without sampling noise.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .codec import (
    JOINT_DECODER,
    JOINT_FIDELITY,
    decode_single,
    encode,
    sample_pairs,
    _ratio_stderr,
    _mean_stderr,
)
from .statekit import PureState, QuantumOperation, design_pairs

MAX_ELEMENTS = 4
_DESIGN = design_pairs()


def params_to_elements(params: np.ndarray, n_elements: int) -> np.ndarray:
    x = np.asarray(params, dtype=float).reshape(2, n_elements, 4, 3)
    return x[0] + 1j * x[1]


def normalize_elements(ks: np.ndarray) -> np.ndarray:
    gain = np.einsum("kji,kjl->il", ks.conj(), ks)
    top = np.linalg.eigvalsh(gain).max()
    if top <= 0.0:
        raise ValueError("all operation elements vanish")
    return ks / np.sqrt(top)


@dataclass(frozen=True)
class DecoderCandidate:
    elements: QuantumOperation
    params: np.ndarray

    @classmethod
    def from_params(cls, params, n_elements: int) -> "DecoderCandidate":
        ks = normalize_elements(params_to_elements(params, n_elements))
        return cls(QuantumOperation(ks), np.asarray(params, dtype=float).copy())

    @classmethod
    def from_operation(cls, op: QuantumOperation) -> "DecoderCandidate":
        ks = normalize_elements(op.elements)
        return cls(QuantumOperation(ks), np.concatenate([ks.real.ravel(), ks.imag.ravel()]))

    @property
    def n_elements(self) -> int:
        return self.elements.elements.shape[0]


class DecoderScore(NamedTuple):
    f1: float
    f2: float
    p: float
    f1_stderr: float = 0.0
    f2_stderr: float = 0.0
    p_stderr: float = 0.0

    @property
    def f(self) -> float:
        return (self.f1 + self.f2) / 2


def evaluate_decoder(candidate: DecoderCandidate | QuantumOperation, n_samples: int | None = None,
                     seed=None) -> DecoderScore:
    """Success-weighted per-qubit fidelities and success probability.

    With ``n_samples=None`` the average is exact (design quadrature); otherwise
    it is a Monte Carlo estimate over Bloch-uniform pairs with standard errors.
    """
    op = candidate.elements if isinstance(candidate, DecoderCandidate) else candidate
    if n_samples is None:
        p, n1, n2 = kernels.decoder_stats(op.elements, _DESIGN)
        return DecoderScore(float(n1.sum() / p.sum()), float(n2.sum() / p.sum()), float(p.mean()))
    q = sample_pairs(np.random.default_rng(seed), n_samples)
    p, n1, n2 = kernels.decoder_stats(op.elements, q)
    return DecoderScore(
        float(n1.sum() / p.sum()), float(n2.sum() / p.sum()), float(p.mean()),
        _ratio_stderr(n1, p), _ratio_stderr(n2, p), _mean_stderr(p),
    )


def _objective(x: np.ndarray, n_elements: int, penalty: float) -> float:
    ks = params_to_elements(x, n_elements)
    p, n1, n2 = kernels.decoder_stats(ks, _DESIGN)
    total = p.sum()
    if total <= 1e-300:
        return 0.0
    f1, f2 = n1.sum() / total, n2.sum() / total
    return -((f1 + f2) / 2 - penalty * (f1 - f2) ** 2)


class OptimizationResult(NamedTuple):
    best: DecoderCandidate
    f: float
    score: DecoderScore
    restart_values: tuple[float, ...]


def _run_restart(args) -> tuple[float, np.ndarray]:
    x0, n_elements, penalty, tolerance = args
    res = minimize(_objective, x0, args=(n_elements, penalty), method="L-BFGS-B",
                   options={"ftol": tolerance, "gtol": 1e-9, "maxiter": 2000})
    return float(res.fun), res.x


def optimize_decoder(restarts: int = 20, tolerance: float = 1e-12, seed=0, n_elements: int = MAX_ELEMENTS,
                     penalty: float = 100.0, workers: int = 1) -> OptimizationResult:
    """Multi-start local search for the best symmetric joint decoder.

    Starts are drawn from one seeded stream in restart order and the best value
    wins, with ties going to the lower restart index.
    """
    if not 1 <= n_elements <= MAX_ELEMENTS:
        raise ValueError(f"n_elements must lie in 1..{MAX_ELEMENTS}")
    rng = np.random.default_rng(seed)
    starts = [rng.normal(size=2 * n_elements * 12) for _ in range(restarts)]
    jobs = [(x0, n_elements, penalty, tolerance) for x0 in starts]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_restart, jobs))
    else:
        results = [_run_restart(j) for j in jobs]
    values = [-fun for fun, _ in results]
    best_idx = int(np.argmax(values))
    best = DecoderCandidate.from_params(results[best_idx][1], n_elements)
    score = evaluate_decoder(best)
    return OptimizationResult(best, score.f, score, tuple(values))


def diagonal_decoder(a: float, b: float, c: float) -> QuantumOperation:
    """``a|00><0| + b|01><1| + c|11><2|``, rescaled to be trace-non-increasing."""
    k = np.zeros((1, 4, 3))
    k[0, 0, 0], k[0, 1, 1], k[0, 3, 2] = a, b, c
    return QuantumOperation(normalize_elements(k))


def optimize_diagonal(penalty: float = 100.0) -> tuple[np.ndarray, float]:
    """Best diagonal decoder with the middle weight fixed to one; returns ``((a, 1, c), F)``."""

    def fun(x):
        s = evaluate_decoder(diagonal_decoder(x[0], 1.0, x[1]))
        return -(s.f - penalty * (s.f1 - s.f2) ** 2)

    res = minimize(fun, [0.5, 0.5], method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    return np.array([res.x[0], 1.0, res.x[1]]), -float(res.fun)


class SingleDecodingReport(NamedTuple):
    n_points: int
    min_fidelity: float
    max_probability_error: float
    average_probability: float


def verify_single_decoding_optimality(n_grid: int = 10) -> SingleDecodingReport:
    """Grid check that projective single-qubit decoding is error-free.

    Polar nodes sit at midpoints of a uniform grid in ``cos(theta)`` and
    azimuths are uniform, so the grid mean of the overall success probability
    (linear in each Bloch vector) equals the Bloch average.
    """
    cos_t = -1.0 + (np.arange(n_grid) + 0.5) * 2.0 / n_grid
    thetas = np.arccos(cos_t)
    phis = np.arange(n_grid) * 2 * np.pi / n_grid
    qubits = [PureState.from_bloch(t, p) for t in thetas for p in phis]
    min_fid = np.inf
    max_err = 0.0
    probs = []
    for q1 in qubits:
        for q2 in qubits:
            enc = encode(q1, q2)
            for which, target in ((1, q1), (2, q2)):
                out, p = decode_single(enc.qutrit, which)
                fid = abs(np.vdot(target.amplitudes, out.amplitudes)) ** 2
                min_fid = min(min_fid, fid)
                expected = abs(q2[1]) ** 2 / enc.success_probability if which == 1 else abs(q1[0]) ** 2 / enc.success_probability
                max_err = max(max_err, abs(p - expected))
                if which == 1:
                    probs.append(enc.success_probability * p)
    return SingleDecodingReport(len(qubits) ** 2, float(min_fid), float(max_err), float(np.mean(probs)))


def reference_decoder() -> DecoderCandidate:
    return DecoderCandidate.from_operation(JOINT_DECODER)


def gap_to_reference(f: float) -> float:
    return f - JOINT_FIDELITY
