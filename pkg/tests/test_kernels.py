import numpy as np
import pytest

from qutritcodec import kernels
from qutritcodec.codec import JOINT_DECODER, sample_pairs

compiled = pytest.mark.skipif("compiled" not in kernels.available_backends(), reason="extension not built")


def _inputs(seed, n=2000, r=3):
    rng = np.random.default_rng(seed)
    ks = rng.normal(size=(r, 4, 3)) + 1j * rng.normal(size=(r, 4, 3))
    return ks, sample_pairs(rng, n)


@compiled
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_backends_agree(seed):
    ks, q = _inputs(seed)
    a = kernels.decoder_stats(ks, q, backend="compiled")
    b = kernels.decoder_stats(ks, q, backend="python")
    for x, y in zip(a, b):
        np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-14)


def test_python_backend_matches_direct_formula():
    ks, q = _inputs(4, n=50, r=2)
    p, n1, n2 = kernels.decoder_stats(ks, q, backend="python")
    for i, (a1, b1, a2, b2) in enumerate(q):
        v = np.array([a1 * a2, a1 * b2, b1 * b2])
        outs = [k @ v for k in ks]
        assert p[i] == pytest.approx(sum(np.vdot(o, o).real for o in outs))
        f1 = 0.0
        for o in outs:
            m = o.reshape(2, 2)
            rho1 = m @ m.conj().T
            f1 += np.vdot([a1, b1], rho1 @ np.array([a1, b1])).real
        assert n1[i] == pytest.approx(f1)


def test_default_backend_reported():
    assert kernels.BACKEND in kernels.available_backends()
    with pytest.raises(ValueError):
        kernels.decoder_stats(JOINT_DECODER.elements, np.zeros((1, 4)), backend="gpu")
