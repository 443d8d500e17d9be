import numpy as np
import pytest

from qutritcodec import codec
from qutritcodec.optics import encoder, hom, verification
from qutritcodec.optics.fock import (
    CouplerSpec,
    FockState,
    ModeOccupation,
    apply_attenuator,
    apply_coupler,
    apply_phase,
    coincidence,
)
from qutritcodec.optics.params import CoincidenceRecord, ImperfectionParams, accidental_rate
from qutritcodec.statekit import BlochAngles, PureState


def occ(*modes):
    return ModeOccupation.from_modes(modes)


def grid(n):
    thetas = np.linspace(0, np.pi, n)
    phis = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return [BlochAngles(t, p) for t in thetas for p in phis]


# --- Fock layer -------------------------------------------------------------


def test_balanced_coupler_bunches_photons():
    s = FockState.from_photons([{"f2": 1.0}, {"f3": 1.0}])
    out = apply_coupler(s, CouplerSpec("f2", "f3", 0.5))
    assert out.probability(coincidence("f2", "f3")) == pytest.approx(0.0, abs=1e-15)
    assert out.amplitude(occ("f2", "f2")) == pytest.approx(1j / np.sqrt(2))
    assert out.norm_sq() == pytest.approx(1.0)


def test_distinguishable_photons_do_not_interfere():
    s = FockState.from_photons([{"f2": 1.0}, {"f3'": 1.0}])
    out = apply_coupler(s, CouplerSpec("f2", "f3", 0.5))
    assert out.probability(coincidence("f2", "f3")) == pytest.approx(0.5)


def test_unknown_mode_rejected():
    with pytest.raises(KeyError):
        apply_coupler(FockState.vacuum(), CouplerSpec("f2", "g9", 0.3))


def test_attenuator_keeps_norm_and_books_loss():
    s = FockState.from_photons([{"f1": 1.0}])
    out = apply_attenuator(s, "f1", 0.3)
    assert out.norm_sq() == pytest.approx(1.0)
    assert out.probability(lambda o: o.in_fiber("loss:f1") == 1) == pytest.approx(0.7)


def test_phase_only_changes_amplitude_phase():
    s = FockState.from_photons([{"f1": 0.6, "f2": 0.8}])
    out = apply_phase(s, "f1", np.pi / 2)
    assert out.amplitude(occ("f1")) == pytest.approx(0.6j)
    assert out.amplitude(occ("f2")) == pytest.approx(0.8)


def test_double_occupation_normalization():
    s = FockState.from_photons([{"f1": 1.0}, {"f1": 1.0}])
    assert s.amplitude(occ("f1", "f1")) == pytest.approx(np.sqrt(2))
    assert s.normalize().norm_sq() == pytest.approx(1.0)


# --- encoder -----------------------------------------------------------------


def test_damping_factors_and_optimal_ratio():
    assert encoder.damping_factors(0.25) == pytest.approx((1.0, 1 / 3))
    assert encoder.optimal_splitting_ratio(1e-4) == pytest.approx(0.25, abs=1e-4)
    # R above 1/4 needs eta_1 > 1
    assert encoder.damping_factors(0.3)[0] < 1.0
    assert encoder.damping_factors(0.2)[0] > 1.0


def test_raw_heralded_amplitudes():
    # hand expansion: f2 -> sqrt(R) f2 + i sqrt(T) f3, f3 -> i sqrt(T) f2 + sqrt(R) f3
    r, t = 0.3, 0.7
    q1, q2 = BlochAngles(1.1, 0.4), BlochAngles(2.0, 5.0)
    (a1, b1), (a2, b2) = q1.state().amplitudes, q2.state().amplitudes
    raw = np.array([1j * np.sqrt(t) * a1 * a2, (r - t) * a1 * b2, np.sqrt(r) * b1 * b2])
    state, p = encoder.simulate_encoding(q1, q2, r, apply_filters=False, compensate=False)
    assert p == pytest.approx(np.vdot(raw, raw).real, abs=1e-14)
    np.testing.assert_allclose(state.amplitudes * np.sqrt(p), raw, atol=1e-14)


def test_optics_reproduces_codec():
    for q1 in grid(5):
        for q2 in grid(5):
            n = 1 - abs(q1.state()[1]) ** 2 * abs(q2.state()[0]) ** 2
            state, p = encoder.simulate_encoding(q1, q2, 0.25)
            if n < 1e-12:
                assert p == pytest.approx(0.0, abs=1e-15)
                continue
            target = codec.encode(q1.state(), q2.state()).qutrit
            assert abs(np.vdot(target.amplitudes, state.amplitudes)) ** 2 == pytest.approx(1.0, abs=1e-12)
            assert p == pytest.approx(encoder.encoding_success_probability(0.25, q1.state(), q2.state()), abs=1e-12)


@pytest.mark.parametrize("r", [0.1, 0.2])
def test_infeasible_ratio_raises(r):
    with pytest.raises(ValueError):
        encoder.simulate_encoding(BlochAngles(1.0, 0.0), BlochAngles(1.0, 0.0), r)


def test_balanced_coupler_raises():
    with pytest.raises(encoder.BalancedCouplerError):
        encoder.simulate_encoding(BlochAngles(1.0, 0.0), BlochAngles(1.0, 0.0), 0.5)


def test_qutrit_density_pure_when_ideal():
    out = encoder.encoder_output(PureState.from_bloch(1.0, 0.0), PureState.from_bloch(1.5, 0.0), 0.25)
    rho, _ = encoder.qutrit_density(out)
    assert np.trace(rho.matrix @ rho.matrix).real == pytest.approx(1.0)


def test_mode_mismatch_mixes_the_qutrit():
    params = ImperfectionParams(mode_overlap=0.9)
    out = encoder.encoder_output(PureState.from_bloch(1.0, 0.0), PureState.from_bloch(1.5, 0.0), 0.25, params)
    rho, _ = encoder.qutrit_density(out)
    assert rho.is_valid()
    assert np.trace(rho.matrix @ rho.matrix).real < 1.0


def test_preparation_efficiency():
    assert encoder.preparation_efficiency(BlochAngles(np.pi / 2, 0.0)) == pytest.approx(1.0)
    assert encoder.preparation_efficiency(BlochAngles(0.0, 0.0)) == pytest.approx(0.5)


# --- HOM -----------------------------------------------------------------------


def test_hom_visibility_values():
    p = ImperfectionParams()
    delays = hom.default_delays(p)
    rates = [r for _, r in hom.hom_dip_scan(0.25, delays, p)]
    assert hom.visibility(rates) == pytest.approx(3 / 7, abs=1e-6)
    # coincidences: R^2 + T^2 = 5/8 far from the dip, (R - T)^2 = 1/4 at it
    assert max(rates) == pytest.approx(5 / 8, abs=1e-9)
    assert min(rates) == pytest.approx(1 / 4, abs=1e-12)
    rates = [r for _, r in hom.hom_dip_scan(0.5, delays, p)]
    assert hom.visibility(rates) == pytest.approx(1.0, abs=1e-12)


def test_hom_overlap_inversion():
    m = hom.overlap_for_visibility(0.5, 0.98)
    assert m == pytest.approx(0.98 * 2 / 1.98)
    p = ImperfectionParams(mode_overlap=m)
    rates = [r for _, r in hom.hom_dip_scan(0.5, hom.default_delays(p), p)]
    assert hom.visibility(rates) == pytest.approx(0.98, abs=1e-6)
    with pytest.raises(ValueError):
        hom.overlap_for_visibility(0.25, 0.9)


def test_hom_visibility_grows_with_overlap():
    vis = []
    for m in np.linspace(0.5, 1.0, 6):
        p = ImperfectionParams(mode_overlap=m)
        vis.append(hom.visibility([r for _, r in hom.hom_dip_scan(0.5, hom.default_delays(p, points=41), p)]))
    assert np.all(np.diff(vis) > 0)


# --- verification ----------------------------------------------------------------


@pytest.mark.parametrize("which", [1, 2])
def test_ideal_verification_is_perfect(which):
    for a in grid(4):
        spectator = BlochAngles(np.pi / 2, 0.0)
        q1, q2 = (a, spectator) if which == 1 else (spectator, a)
        out = encoder.encoder_output(q1.state(), q2.state(), 0.25)
        rec = verification.mz_verify(out, which, a)
        if rec.c_plus + rec.c_minus < 1e-14:
            continue
        assert rec.c_minus == pytest.approx(0.0, abs=1e-14)
        # coincidence equals the herald-and-decode probability
        p = encoder.encoding_success_probability(0.25, q1.state(), q2.state())
        levels = (1, 2) if which == 1 else (0, 1)
        target = codec.encode(q1.state(), q2.state()).qutrit.amplitudes
        assert rec.c_plus == pytest.approx(p * sum(abs(target[k]) ** 2 for k in levels), abs=1e-12)


def test_interferometer_visibility_bounds_equatorial_fidelity():
    # P(D1) = |1/2 + V/2|^2 + (1 - V^2)/4 = (1 + V)/2 for an equatorial state
    v = 0.9
    a = BlochAngles(np.pi / 2, 0.0)
    out = encoder.encoder_output(a.state(), a.state(), 0.25)
    rec = verification.mz_verify(out, 1, a, ImperfectionParams(mz_visibility=v))
    assert rec.fidelity == pytest.approx((1 + v) / 2, abs=1e-12)


def test_orthogonal_basis_swaps_detectors():
    a = BlochAngles(np.pi / 2, 0.0)
    out = encoder.encoder_output(a.state(), a.state(), 0.25)
    rec = verification.mz_verify(out, 1, BlochAngles(np.pi / 2, np.pi))
    assert rec.c_plus == pytest.approx(0.0, abs=1e-14)


def test_fringe_coefficients_reproduce_direct_evaluation():
    a = BlochAngles(1.2, 0.5)
    out = encoder.encoder_output(a.state(), BlochAngles(np.pi / 2, 0.0).state(), 0.25)
    params = ImperfectionParams(mz_visibility=0.95, detector_efficiency=0.5, dark_count_rate=100.0)
    coeffs = verification.fringe_coefficients(out, 1, a, params, 5000.0)
    for d in (0.3, 1.7, -2.2):
        rec = verification.mz_verify(out, 1, a, params, 5000.0, d)
        model = coeffs @ np.array([1.0, np.cos(d), np.sin(d)])
        np.testing.assert_allclose(model, [rec.c_plus, rec.c_minus], rtol=1e-12)


def test_global_phase_of_input_is_irrelevant():
    a = BlochAngles(1.0, 2.0)
    s1 = a.state()
    s2 = PureState(s1.amplitudes * np.exp(0.9j))
    spectator = PureState.from_bloch(np.pi / 2, 0.0)
    r1 = verification.mz_verify(encoder.encoder_output(s1, spectator, 0.25), 1, a)
    r2 = verification.mz_verify(encoder.encoder_output(s2, spectator, 0.25), 1, a)
    assert r1.c_plus == pytest.approx(r2.c_plus, abs=1e-15)


def test_dark_counts_add_accidentals():
    p = ImperfectionParams(dark_count_rate=50.0, coincidence_window=2e-9)
    assert accidental_rate(1000.0, 2000.0, p) == pytest.approx(2e-9 * 50 * 3000)
    with pytest.raises(ValueError):
        CoincidenceRecord(-1.0, 0.0)


def test_drift_rate_calibration_and_resets():
    rate = 0.05
    _, ph = verification.phase_drift_process(1.0, rate, seed=3, dt=0.01, block=None, n_trials=40_000)
    assert np.mean(np.abs(ph[:, -1] - ph[:, 0])) == pytest.approx(rate, rel=0.02)
    t, ph = verification.phase_drift_process(20.0, 1.0, seed=3, dt=0.1, block=5.0)
    assert np.all(ph[np.isclose(t % 5.0, 0.0)] == 0.0)
    _, flat = verification.phase_drift_process(10.0, 0.0, seed=1)
    assert np.all(flat == 0.0)


def test_params_round_trip_and_validation():
    p = ImperfectionParams(mode_overlap=0.9, dark_count_rate=10.0)
    assert ImperfectionParams.from_dict(p.to_dict()) == p
    with pytest.raises(ValueError):
        ImperfectionParams.from_dict({"bogus": 1})
    with pytest.raises(ValueError):
        ImperfectionParams(detector_efficiency=1.5)
