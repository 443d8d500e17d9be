import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qutritcodec.statekit import (
    BLOCH_DESIGN,
    BlochAngles,
    DensityMatrix,
    DimensionError,
    PovmElement,
    PureState,
    QuantumOperation,
    apply_operation,
    design_pairs,
    fidelity,
    is_complete,
    measure_povm,
    partial_trace,
    sample_bloch_amplitudes,
    sample_bloch_uniform,
    tensor_product,
)

angles = st.tuples(st.floats(0.0, np.pi), st.floats(0.0, 2 * np.pi, exclude_max=True))


def test_normalize_and_zero_vector():
    s = PureState([3.0, 4.0]).normalize()
    assert s.is_normalized()
    np.testing.assert_allclose(s.amplitudes, [0.6, 0.8])
    with pytest.raises(ValueError):
        PureState([0.0, 0.0]).normalize()


def test_state_shape_checks():
    with pytest.raises(DimensionError):
        PureState([1.0])
    with pytest.raises(DimensionError):
        PureState(np.eye(2))


def test_states_are_read_only():
    s = PureState([1.0, 0.0])
    with pytest.raises(ValueError):
        s.amplitudes[0] = 2.0


def test_bloch_poles_are_exact():
    assert PureState.from_bloch(np.pi, 0.0).amplitudes[0] == 0.0
    assert PureState.from_bloch(0.0, 1.0).amplitudes[1] == 0.0


def test_bloch_angle_ranges():
    with pytest.raises(ValueError):
        BlochAngles(-0.1, 0.0)
    with pytest.raises(ValueError):
        BlochAngles(0.0, 2 * np.pi)
    a = BlochAngles.from_degrees(90.0, 360.0)
    assert a.phi == 0.0


@given(angles)
def test_bloch_states_are_normalized(tp):
    assert PureState.from_bloch(*tp).is_normalized()


def test_trace_increasing_operation_rejected():
    with pytest.raises(ValueError):
        QuantumOperation(np.eye(2) * 1.01)
    op = QuantumOperation(np.eye(2) * 1.01, check=False)
    assert op.max_gain() == pytest.approx(1.0201)


def test_apply_operation_reports_branch_probabilities():
    # projective measurement split into two elements
    ks = np.array([[[1, 0], [0, 0]], [[0, 0], [0, 1]]], dtype=complex)
    out = apply_operation(QuantumOperation(ks), PureState.from_bloch(np.pi / 2, 0.0))
    assert [p for _, p in out] == pytest.approx([0.5, 0.5])
    with pytest.raises(DimensionError):
        apply_operation(QuantumOperation(ks), PureState([1, 0, 0]))


def test_povm_completeness_and_probabilities():
    p0 = PovmElement.projector(3, [0, 1])
    p1 = PovmElement.projector(3, [2])
    assert is_complete([p0, p1])
    s = PureState([1, 1, 1]).normalize()
    assert measure_povm([p0, p1], s) == pytest.approx([2 / 3, 1 / 3])
    with pytest.raises(ValueError):
        measure_povm([p0], s)
    with pytest.raises(ValueError):
        PovmElement(-np.eye(2))


@settings(max_examples=50)
@given(angles, angles)
def test_partial_trace_of_product_recovers_factors(a, b):
    qa, qb = PureState.from_bloch(*a), PureState.from_bloch(*b)
    rho = tensor_product(qa, qb).density()
    np.testing.assert_allclose(partial_trace(rho, (2, 2), 1).matrix, qa.density().matrix, atol=1e-12)
    np.testing.assert_allclose(partial_trace(rho, (2, 2), 2).matrix, qb.density().matrix, atol=1e-12)


def test_partial_trace_of_bell_state_is_mixed():
    bell = PureState([1, 0, 0, 1]).normalize()
    red = partial_trace(bell.density(), (2, 2), 1)
    np.testing.assert_allclose(red.matrix, np.eye(2) / 2, atol=1e-15)
    assert red.is_valid()
    with pytest.raises(DimensionError):
        partial_trace(bell.density(), (3, 2), 1)


def test_fidelity_values():
    plus = PureState.from_bloch(np.pi / 2, 0.0)
    assert fidelity(plus, plus.density()) == pytest.approx(1.0)
    assert fidelity(plus, DensityMatrix(np.eye(2) / 2)) == pytest.approx(0.5)
    assert fidelity(plus, PureState.from_bloch(np.pi / 2, np.pi).density()) == pytest.approx(0.0, abs=1e-15)


def test_sampler_marginals_are_uniform():
    q = sample_bloch_amplitudes(np.random.default_rng(1), 200_000)
    # Bloch z = |a|^2 - |b|^2 uniform on [-1, 1]: mean 0, variance 1/3
    z = np.abs(q[:, 0]) ** 2 - np.abs(q[:, 1]) ** 2
    assert abs(z.mean()) < 0.01
    assert z.var() == pytest.approx(1 / 3, abs=0.005)
    np.testing.assert_allclose(np.linalg.norm(q, axis=1), 1.0, atol=1e-14)


def test_scalar_and_vector_samplers_agree():
    a = sample_bloch_uniform(np.random.default_rng(5)).state().amplitudes
    b = sample_bloch_amplitudes(np.random.default_rng(5), 1)[0]
    np.testing.assert_allclose(a, b, atol=1e-15)


def test_design_reproduces_second_and_third_moments():
    bloch = np.array(
        [
            [2 * (np.conj(a) * b).real, 2 * (np.conj(a) * b).imag, abs(a) ** 2 - abs(b) ** 2]
            for a, b in BLOCH_DESIGN
        ]
    )
    np.testing.assert_allclose(bloch.mean(axis=0), 0.0, atol=1e-15)
    np.testing.assert_allclose(bloch.T @ bloch / len(bloch), np.eye(3) / 3, atol=1e-15)
    np.testing.assert_allclose(np.einsum("ni,nj,nk->ijk", bloch, bloch, bloch), 0.0, atol=1e-15)
    assert design_pairs().shape == (36, 4)
