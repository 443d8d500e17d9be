"""Probabilistic encoding of two qubits into one qutrit.

Subpackages and modules
-----------------------
statekit
    Pure/mixed states, operations, POVMs, partial trace, fidelity, sampling.
codec
    Two-qubit to qutrit encoding with single and optimal joint decoding.
ladder
    N-qubit and N-qudit ladder generalizations.
optics
    Fock-space model of the fiber-optic implementation.
optimizer
    Numerical search over decoders and coupler ratios.
"""

__version__ = "0.1.0"
