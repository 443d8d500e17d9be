"""Pure numpy fallback for the compiled kernels."""

import numpy as np


def decoder_stats(ks, q):
    """Per-sample statistics of a qutrit-to-two-qubit decoder.

    For each row ``(a1, b1, a2, b2)`` of ``q`` the two qubits are encoded into
    the unnormalized qutrit ``(a1 a2, a1 b2, b1 b2)`` and every element of
    ``ks`` (shape ``(r, 4, 3)``) is applied.

    Returns three float arrays of length ``n``: the total success probability
    and, for each qubit, the unnormalized fidelity ``<psi_j| Tr_other(out) |psi_j>``.
    Dividing the sums of the latter by the sum of the former gives the
    success-weighted average fidelity.
    """
    ks = np.asarray(ks, dtype=complex)
    q = np.asarray(q, dtype=complex)
    if ks.ndim != 3 or ks.shape[1:] != (4, 3):
        raise ValueError("operation elements must have shape (r, 4, 3)")
    if q.ndim != 2 or q.shape[1] != 4:
        raise ValueError("inputs must have shape (n, 4)")
    a1, b1, a2, b2 = q.T
    v = np.stack([a1 * a2, a1 * b2, b1 * b2], axis=1)
    out = np.einsum("kij,nj->nki", ks, v).reshape(len(q), len(ks), 2, 2)
    p = np.sum(np.abs(out) ** 2, axis=(1, 2, 3))
    q1 = q[:, 0:2].conj()
    q2 = q[:, 2:4].conj()
    n1 = np.sum(np.abs(np.einsum("ni,nkij->nkj", q1, out)) ** 2, axis=(1, 2))
    n2 = np.sum(np.abs(np.einsum("nj,nkij->nki", q2, out)) ** 2, axis=(1, 2))
    return p, n1, n2
