"""Small dense linear-algebra layer for finite-dimensional pure and mixed states.

Composite systems use row-major ordering with the first subsystem as the most
significant index, so ``tensor_product(a, b)[i * b.dim + j] == a[i] * b[j]``.
All containers are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

ATOL_EXACT = 1e-12
ATOL_PSD = 1e-10
_POLE_TOL = 1e-15


class DimensionError(ValueError):
    """Raised when operand dimensions do not match."""


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PureState:
    """Complex amplitude vector over a finite basis.

    Construction does not normalize; call :meth:`normalize` for that.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1 or amps.size < 2:
            raise DimensionError(f"a state needs a 1-d vector of length >= 2, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "PureState":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return PureState(self.amplitudes / n)

    def is_normalized(self, atol: float = ATOL_EXACT) -> bool:
        return abs(self.norm - 1.0) <= atol

    def density(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()))

    def __getitem__(self, k):
        return self.amplitudes[k]

    def __len__(self):
        return self.dim

    @classmethod
    def basis(cls, dim: int, k: int) -> "PureState":
        amps = np.zeros(dim, dtype=complex)
        amps[k] = 1.0
        return cls(amps)

    @classmethod
    def from_bloch(cls, theta: float, phi: float) -> "PureState":
        """Qubit ``cos(theta/2)|0> + exp(i phi) sin(theta/2)|1>``.

        Components below rounding level are set to zero so the poles are
        exact basis states.
        """
        c, s = np.cos(theta / 2), np.sin(theta / 2)
        c = 0.0 if abs(c) < _POLE_TOL else c
        s = 0.0 if abs(s) < _POLE_TOL else s
        return cls([c, np.exp(1j * phi) * s])


@dataclass(frozen=True)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {m.shape}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def normalize(self) -> "DensityMatrix":
        t = self.trace
        if t == 0.0:
            raise ValueError("cannot normalize a zero-trace matrix")
        return DensityMatrix(self.matrix / t)

    def is_valid(self, atol: float = ATOL_PSD) -> bool:
        """Hermitian, positive semidefinite and unit trace."""
        m = self.matrix
        if not np.allclose(m, m.conj().T, atol=ATOL_EXACT):
            return False
        if np.linalg.eigvalsh(m).min() < -atol:
            return False
        return abs(self.trace - 1.0) <= ATOL_EXACT


@dataclass(frozen=True)
class QuantumOperation:
    """Probabilistic operation given by its operation elements ``K_i``.

    ``elements`` has shape ``(r, out_dim, in_dim)``; the map is required to be
    trace-non-increasing, ``sum_i K_i^dag K_i <= I``.
    """

    elements: np.ndarray
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        ks = np.array(self.elements, dtype=complex)
        if ks.ndim == 2:
            ks = ks[None]
        if ks.ndim != 3:
            raise DimensionError(f"operation elements must be a stack of matrices, got shape {ks.shape}")
        ks.setflags(write=False)
        object.__setattr__(self, "elements", ks)
        if self.check and self.max_gain() > 1.0 + ATOL_PSD:
            raise ValueError(f"operation is trace-increasing (largest eigenvalue {self.max_gain():.6g})")

    @property
    def in_dim(self) -> int:
        return self.elements.shape[2]

    @property
    def out_dim(self) -> int:
        return self.elements.shape[1]

    def gain_matrix(self) -> np.ndarray:
        """``sum_i K_i^dag K_i``."""
        ks = self.elements
        return np.einsum("kji,kjl->il", ks.conj(), ks)

    def max_gain(self) -> float:
        return float(np.linalg.eigvalsh(self.gain_matrix()).max())

    @classmethod
    def from_map(cls, mapping: dict[int, tuple[int, complex]], in_dim: int, out_dim: int) -> "QuantumOperation":
        """Single-element operation sending ``|i> -> c |j>`` for ``mapping[i] = (j, c)``."""
        k = np.zeros((out_dim, in_dim), dtype=complex)
        for i, (j, c) in mapping.items():
            k[j, i] = c
        return cls(k)


@dataclass(frozen=True)
class PovmElement:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"POVM element must be square, got shape {m.shape}")
        if not np.allclose(m, m.conj().T, atol=ATOL_PSD) or np.linalg.eigvalsh(m).min() < -ATOL_PSD:
            raise ValueError("POVM element must be positive semidefinite")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def projector(cls, dim: int, levels: Sequence[int]) -> "PovmElement":
        m = np.zeros((dim, dim), dtype=complex)
        for k in levels:
            m[k, k] = 1.0
        return cls(m)


@dataclass(frozen=True)
class BlochAngles:
    theta: float
    phi: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2 * np.pi:
            raise ValueError(f"phi must lie in [0, 2 pi), got {self.phi}")

    @classmethod
    def from_degrees(cls, theta: float, phi: float) -> "BlochAngles":
        return cls(np.deg2rad(theta), np.deg2rad(phi) % (2 * np.pi))

    def state(self) -> PureState:
        return PureState.from_bloch(self.theta, self.phi)


def tensor_product(a: PureState, b: PureState) -> PureState:
    return PureState(np.kron(a.amplitudes, b.amplitudes))


def apply_operation(op: QuantumOperation, s: PureState) -> list[tuple[PureState, float]]:
    """Run every operation element on ``s``.

    Returns one ``(normalized output, probability)`` pair per element with a
    nonzero branch; the probability deficit is the failure probability.
    """
    if op.in_dim != s.dim:
        raise DimensionError(f"operation expects dimension {op.in_dim}, state has {s.dim}")
    outcomes = []
    for k in op.elements:
        v = k @ s.amplitudes
        p = float(np.vdot(v, v).real)
        if p > 0.0:
            outcomes.append((PureState(v / np.sqrt(p)), p))
    return outcomes


def _povm_matrices(elements) -> list[np.ndarray]:
    return [e.matrix if isinstance(e, PovmElement) else np.asarray(e, dtype=complex) for e in elements]


def is_complete(elements, atol: float = ATOL_PSD) -> bool:
    mats = _povm_matrices(elements)
    return np.allclose(sum(mats), np.eye(mats[0].shape[0]), atol=atol)


def measure_povm(elements, s: PureState) -> list[float]:
    """Outcome probabilities ``<s|Pi_i|s>`` for a complete measurement."""
    mats = _povm_matrices(elements)
    if any(m.shape != (s.dim, s.dim) for m in mats):
        raise DimensionError("POVM elements and state have different dimensions")
    if not is_complete(mats):
        raise ValueError("POVM elements do not sum to the identity")
    a = s.amplitudes
    return [float(np.vdot(a, m @ a).real) for m in mats]


def partial_trace(rho: DensityMatrix, dims: tuple[int, int], keep: int) -> DensityMatrix:
    d1, d2 = dims
    if d1 * d2 != rho.dim:
        raise DimensionError(f"dims {dims} do not factor a {rho.dim}-dimensional state")
    t = rho.matrix.reshape(d1, d2, d1, d2)
    if keep == 1:
        return DensityMatrix(np.einsum("ijkj->ik", t))
    if keep == 2:
        return DensityMatrix(np.einsum("jijk->ik", t))
    raise ValueError(f"keep must be 1 or 2, got {keep}")


def fidelity(psi: PureState, rho: DensityMatrix) -> float:
    """``<psi|rho|psi>`` for a normalized target ``psi``."""
    if psi.dim != rho.dim:
        raise DimensionError(f"state has dimension {psi.dim}, density matrix {rho.dim}")
    a = psi.amplitudes
    return float(np.vdot(a, rho.matrix @ a).real)


def sample_bloch_uniform(rng: np.random.Generator) -> BlochAngles:
    """One draw from the rotation-invariant measure on the Bloch sphere."""
    cos_theta = rng.uniform(-1.0, 1.0)
    phi = rng.uniform(0.0, 2 * np.pi)
    return BlochAngles(float(np.arccos(cos_theta)), float(phi))


def sample_bloch_amplitudes(rng: np.random.Generator, n: int) -> np.ndarray:
    """Vectorized variant of :func:`sample_bloch_uniform`.

    Returns an ``(n, 2)`` complex array of qubit amplitudes, drawing
    ``cos(theta)`` and ``phi`` in the same order as the scalar sampler.
    """
    cos_theta = rng.uniform(-1.0, 1.0, n)
    phi = rng.uniform(0.0, 2 * np.pi, n)
    # cos^2(theta/2) = (1 + cos theta) / 2
    c = np.sqrt((1.0 + cos_theta) / 2.0)
    s = np.sqrt((1.0 - cos_theta) / 2.0)
    return np.stack([c + 0j, np.exp(1j * phi) * s], axis=1)


# Octahedron vertices on the Bloch sphere: a spherical 3-design, so averages of
# any polynomial of degree <= 3 in the Bloch vector are reproduced exactly.
BLOCH_DESIGN = np.array(
    [
        [1.0, 0.0],
        [0.0, 1.0],
        [1 / np.sqrt(2), 1 / np.sqrt(2)],
        [1 / np.sqrt(2), -1 / np.sqrt(2)],
        [1 / np.sqrt(2), 1j / np.sqrt(2)],
        [1 / np.sqrt(2), -1j / np.sqrt(2)],
    ],
    dtype=complex,
)
BLOCH_DESIGN.setflags(write=False)


def design_pairs() -> np.ndarray:
    """All 36 pairs of design states as an ``(36, 4)`` array ``(a1, b1, a2, b2)``."""
    q1 = np.repeat(BLOCH_DESIGN, len(BLOCH_DESIGN), axis=0)
    q2 = np.tile(BLOCH_DESIGN, (len(BLOCH_DESIGN), 1))
    return np.hstack([q1, q2])
