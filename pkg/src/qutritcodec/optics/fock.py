"""Few-photon Fock states over named modes and passive linear elements.

A mode name is a fiber name followed by zero or more primes; the primes label
mutually orthogonal internal states (timing, polarization) of a photon in that
fiber.  ``"f2"`` and ``"f2'"`` are the same fiber, so detectors sum over them,
but photons in them do not interfere.  Lost photons go to ``"loss:<fiber>"``.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from math import factorial, prod, sqrt
from typing import Callable, Iterable, Mapping

import numpy as np

ATOL = 1e-15

FIBERS = frozenset({"f1", "f2", "f3", "f4", "f5", "f6", "d1", "d2"})


def fiber_of(mode: str) -> str:
    return mode.rstrip("'")


def internal_of(mode: str) -> str:
    return mode[len(fiber_of(mode)):]


@dataclass(frozen=True, order=True)
class ModeOccupation:
    """Photon numbers per mode, stored as sorted ``(mode, count)`` pairs."""

    pairs: tuple[tuple[str, int], ...]

    @classmethod
    def from_modes(cls, modes: Iterable[str]) -> "ModeOccupation":
        counts: dict[str, int] = defaultdict(int)
        for m in modes:
            counts[m] += 1
        return cls(tuple(sorted(counts.items())))

    @property
    def counts(self) -> dict[str, int]:
        return dict(self.pairs)

    @property
    def total(self) -> int:
        return sum(n for _, n in self.pairs)

    def modes(self) -> list[str]:
        """Creation-operator list, one entry per photon."""
        return [m for m, n in self.pairs for _ in range(n)]

    def in_fiber(self, fiber: str) -> int:
        return sum(n for m, n in self.pairs if fiber_of(m) == fiber)

    def without_fiber(self, fiber: str) -> "ModeOccupation":
        return ModeOccupation(tuple(p for p in self.pairs if fiber_of(p[0]) != fiber))

    def __str__(self):
        return "|" + ", ".join(f"{m}:{n}" for m, n in self.pairs) + ">"


def _norm_factor(occ: ModeOccupation) -> float:
    return sqrt(prod(factorial(n) for _, n in occ.pairs))


class FockState:
    """Superposition of mode occupations with complex amplitudes.

    Instances are treated as immutable; every operation returns a new state.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[ModeOccupation, complex] | None = None):
        self._terms = {k: complex(v) for k, v in (terms or {}).items() if abs(v) > ATOL}

    @property
    def terms(self) -> dict[ModeOccupation, complex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def amplitude(self, occ: ModeOccupation) -> complex:
        return self._terms.get(occ, 0j)

    def norm_sq(self) -> float:
        return float(sum(abs(c) ** 2 for c in self._terms.values()))

    def normalize(self) -> "FockState":
        n = self.norm_sq()
        if n == 0.0:
            raise ValueError("cannot normalize an empty Fock state")
        return self.scale(1 / sqrt(n))

    def scale(self, c: complex) -> "FockState":
        return FockState({k: c * v for k, v in self._terms.items()})

    def __add__(self, other: "FockState") -> "FockState":
        out = defaultdict(complex, self._terms)
        for k, v in other.items():
            out[k] += v
        return FockState(out)

    def __len__(self):
        return len(self._terms)

    def __repr__(self):
        body = " + ".join(f"({c:.4g}){k}" for k, c in sorted(self._terms.items()))
        return f"FockState({body or '0'})"

    def select(self, predicate: Callable[[ModeOccupation], bool]) -> "FockState":
        """Unnormalized projection onto occupations satisfying ``predicate``."""
        return FockState({k: v for k, v in self._terms.items() if predicate(k)})

    def probability(self, predicate: Callable[[ModeOccupation], bool]) -> float:
        return float(sum(abs(v) ** 2 for k, v in self._terms.items() if predicate(k)))

    def photon_numbers(self) -> set[int]:
        return {k.total for k in self._terms}

    def fibers(self) -> set[str]:
        return {fiber_of(m) for k in self._terms for m, _ in k.pairs}

    @classmethod
    def vacuum(cls) -> "FockState":
        return cls({ModeOccupation(()): 1.0})

    @classmethod
    def from_photons(cls, photons: Iterable[Mapping[str, complex]]) -> "FockState":
        """Apply one creation operator ``sum_m c_m a_m^dag`` per photon to the vacuum."""
        return _create(list(photons), 1.0)


def _create(photons: list[Mapping[str, complex]], scale: complex) -> FockState:
    out: dict[ModeOccupation, complex] = defaultdict(complex)
    for combo in itertools.product(*(p.items() for p in photons)):
        amp = scale
        for _, c in combo:
            amp *= c
        if amp == 0:
            continue
        occ = ModeOccupation.from_modes(m for m, _ in combo)
        out[occ] += amp * _norm_factor(occ)
    return FockState(out)


Transfer = Callable[[str], "Mapping[str, complex] | None"]


def apply_transfer(state: FockState, transfer: Transfer) -> FockState:
    """Transform every creation operator by ``a_m^dag -> sum_k T[m][k] a_k^dag``.

    ``transfer(mode)`` returns the output amplitudes for ``mode`` or ``None``
    when the element leaves it untouched.
    """
    out = FockState()
    for occ, c in state.items():
        photons = []
        for m in occ.modes():
            t = transfer(m)
            photons.append({m: 1.0} if t is None else t)
        out = out + _create(photons, c / _norm_factor(occ))
    return out


def coupler_matrix(reflectance: float) -> np.ndarray:
    """Single-photon transfer matrix: ``sqrt(R)`` on the diagonal, ``i sqrt(T)`` across."""
    r, t = sqrt(reflectance), sqrt(1.0 - reflectance)
    return np.array([[r, 1j * t], [1j * t, r]])


@dataclass(frozen=True)
class CouplerSpec:
    """Two-mode fiber coupler; ``R`` applies to a->a and b->b, ``T = 1 - R`` across."""

    mode_a: str
    mode_b: str
    reflectance: float

    def __post_init__(self):
        if not 0.0 <= self.reflectance <= 1.0:
            raise ValueError(f"reflectance must lie in [0, 1], got {self.reflectance}")
        if self.mode_a == self.mode_b:
            raise ValueError("a coupler needs two distinct modes")

    @property
    def transmittance(self) -> float:
        return 1.0 - self.reflectance

    def matrix(self) -> np.ndarray:
        return coupler_matrix(self.reflectance)


def _two_mode_transfer(fa: str, fb: str, u: np.ndarray, out_a: str | None = None, out_b: str | None = None) -> Transfer:
    out_a = out_a or fa
    out_b = out_b or fb

    def transfer(mode):
        f, s = fiber_of(mode), internal_of(mode)
        if f == fa:
            col = 0
        elif f == fb:
            col = 1
        else:
            return None
        return {out_a + s: u[0, col], out_b + s: u[1, col]}

    return transfer


def apply_coupler(state: FockState, spec: CouplerSpec) -> FockState:
    known = FIBERS | state.fibers()
    for f in (spec.mode_a, spec.mode_b):
        if f not in known:
            raise KeyError(f"unknown mode {f!r}")
    return apply_transfer(state, _two_mode_transfer(spec.mode_a, spec.mode_b, spec.matrix()))


def apply_two_mode_unitary(state: FockState, mode_a: str, mode_b: str, u: np.ndarray,
                           out_a: str | None = None, out_b: str | None = None) -> FockState:
    """General two-mode linear element, optionally renaming the output fibers."""
    u = np.asarray(u, dtype=complex)
    if not np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12):
        raise ValueError("two-mode element must be unitary")
    return apply_transfer(state, _two_mode_transfer(mode_a, mode_b, u, out_a, out_b))


def apply_attenuator(state: FockState, mode: str, eta: float) -> FockState:
    """Transmission ``eta``; the reflected part goes to ``loss:<mode>``."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"transmission must lie in [0, 1], got {eta}")
    keep, lose = sqrt(eta), sqrt(1.0 - eta)

    def transfer(m):
        if fiber_of(m) != mode:
            return None
        return {m: keep, "loss:" + m: lose}

    return apply_transfer(state, transfer)


def apply_phase(state: FockState, mode: str, phase: float) -> FockState:
    factor = np.exp(1j * phase)
    return apply_transfer(state, lambda m: {m: factor} if fiber_of(m) == mode else None)


def route(state: FockState, connections: Mapping[str, str]) -> FockState:
    """Rename fibers, e.g. ``{"f1": "f5", "f2": "f6"}``."""
    return apply_transfer(
        state, lambda m: {connections[fiber_of(m)] + internal_of(m): 1.0} if fiber_of(m) in connections else None
    )


def apply_internal_mismatch(state: FockState, fiber: str, overlap: float, level: int = 2) -> FockState:
    """Rotate the internal state of photons in ``fiber`` away from the reference.

    The reference internal state ``""`` becomes ``overlap * "" + sqrt(1 - overlap^2) * "'"*level``,
    which caps single-photon interference visibility with other fibers at ``overlap``.
    """
    if not 0.0 <= overlap <= 1.0:
        raise ValueError("overlap must lie in [0, 1]")
    other = "'" * level
    s = sqrt(1.0 - overlap**2)

    def transfer(m):
        if fiber_of(m) != fiber:
            return None
        tag = internal_of(m)
        if tag == "":
            return {fiber: overlap, fiber + other: s}
        if tag == other:
            return {fiber: -s, fiber + other: overlap}
        return None

    return apply_transfer(state, transfer)


def click(fiber: str) -> Callable[[ModeOccupation], bool]:
    """Bucket detector: at least one photon in any internal mode of ``fiber``."""
    return lambda occ: occ.in_fiber(fiber) > 0


def coincidence(*fibers: str) -> Callable[[ModeOccupation], bool]:
    return lambda occ: all(occ.in_fiber(f) > 0 for f in fibers)
