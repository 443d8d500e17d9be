"""Ladder codes: N qudits of dimension d into one N(d-1)+1 level system.

A product basis string is kept only if it climbs a ladder: non-decreasing,
with every system below the first non-zero one at level 0 and every system
after it at level d-1, i.e. ``(0, ..., 0, k, d-1, ..., d-1)``.  Such a string
is sent to the code level equal to the sum of its digits; every other string
is filtered out.

For ``N = 2, d = 2`` this is the two-qubit encoding of :mod:`qutritcodec.codec`
and for ``N = 2, d = 3`` the two-qutrit five-level code.  The general N-qudit
map is an extrapolation of these two instances.

System ``n`` (1-based) is read from the ``d`` consecutive code levels
``(d-1)(N-n), ..., (d-1)(N-n+1)``; on that window all other systems sit at
fixed levels so the window amplitudes are proportional to system ``n``.  For
qubits the window of the last system is ``{0, 1}`` and of the first system is
``{N-1, N}``, which is the mirror image of labelling the systems from the
other end.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import prod

import numpy as np

from .codec import EncodingError
from .statekit import PovmElement, PureState, QuantumOperation


@dataclass(frozen=True)
class LadderCode:
    n_systems: int
    d: int = 2

    def __post_init__(self):
        if self.n_systems < 1:
            raise ValueError("need at least one system")
        if self.d < 2:
            raise ValueError("local dimension must be at least 2")

    @property
    def code_dim(self) -> int:
        return self.n_systems * (self.d - 1) + 1

    @cached_property
    def strings(self) -> tuple[tuple[int, ...], ...]:
        """Kept product strings, indexed by code level."""
        n, top = self.n_systems, self.d - 1
        out = []
        for level in range(self.code_dim):
            if level == 0:
                out.append((0,) * n)
                continue
            # position (from the end) of the partially raised system
            pos, k = divmod(level - 1, top)
            k += 1
            idx = n - 1 - pos
            out.append((0,) * idx + (k,) + (top,) * (n - 1 - idx))
        return tuple(out)

    def window(self, n: int) -> range:
        """Code levels carrying system ``n`` (1-based)."""
        if not 1 <= n <= self.n_systems:
            raise ValueError(f"system index must lie in 1..{self.n_systems}, got {n}")
        start = (self.d - 1) * (self.n_systems - n)
        return range(start, start + self.d)

    def encoding_operation(self) -> QuantumOperation:
        """Single-element map from the product space to the code space."""
        k = np.zeros((self.code_dim, self.d**self.n_systems))
        for level, s in enumerate(self.strings):
            k[level, np.ravel_multi_index(s, (self.d,) * self.n_systems)] = 1.0
        return QuantumOperation(k)

    def decoding_povm(self, n: int) -> tuple[PovmElement, PovmElement]:
        plus = PovmElement.projector(self.code_dim, self.window(n))
        return plus, PovmElement(np.eye(self.code_dim) - plus.matrix)

    def encode(self, states) -> tuple[PureState, float]:
        if len(states) != self.n_systems:
            raise ValueError(f"expected {self.n_systems} states, got {len(states)}")
        for s in states:
            if s.dim != self.d or not s.is_normalized():
                raise ValueError(f"inputs must be normalized {self.d}-level states")
        amps = np.array([prod(st.amplitudes[k] for st, k in zip(states, s)) for s in self.strings])
        p = float(np.vdot(amps, amps).real)
        if p == 0.0:
            raise EncodingError("encoding always fails for this input")
        return PureState(amps / np.sqrt(p)), p

    def decode(self, state: PureState, n: int) -> tuple[PureState | None, float]:
        if state.dim != self.code_dim:
            raise ValueError(f"expected a {self.code_dim}-level state, got {state.dim}")
        v = state.amplitudes[list(self.window(n))]
        p = float(np.vdot(v, v).real)
        if p == 0.0:
            return None, 0.0
        return PureState(v / np.sqrt(p)), p


def encode_n_qubits(qubits) -> tuple[PureState, float]:
    return LadderCode(len(qubits), 2).encode(qubits)


def decode_nth_qubit(state: PureState, n: int) -> tuple[PureState | None, float]:
    return LadderCode(state.dim - 1, 2).decode(state, n)


def encode_two_qutrits(t1: PureState, t2: PureState) -> tuple[PureState, float]:
    return LadderCode(2, 3).encode([t1, t2])


def decode_qutrit(state: PureState, which: int) -> tuple[PureState | None, float]:
    return LadderCode(2, 3).decode(state, which)
