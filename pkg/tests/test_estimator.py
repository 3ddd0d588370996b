"""Three-stage estimator: per-stage oracles, invariances, end-to-end exactness."""

import numpy as np
import pytest
import scipy.optimize

from conftest import reference_arrays, reference_params
from risloc import (
    ChannelParams,
    ConfigurationError,
    DegenerateGeometryError,
    EstimationError,
    InsufficientSoundingsError,
    SearchGrid,
    build_null_system,
    cascaded_channel,
    collect_soundings,
    effective_gain,
    estimate_channel,
    estimate_coupling,
    estimate_gain,
    estimate_ris_angles,
    estimate_theta_u,
    frobenius_error_terms,
    make_pilots,
    random_phase_shifts,
    reconstruct_channel,
    ula_response_at,
    upa_response,
)


def _noiseless_soundings(params, arrays, n_blocks, seed, power=1.0):
    rng = np.random.default_rng(seed)
    omegas = np.stack(
        [random_phase_shifts(rng, arrays.ris.n_elements) for _ in range(n_blocks)]
    )
    pilots = make_pilots(arrays.ue.n_elements, power)
    return collect_soundings(params, omegas, pilots, arrays)


def _noisy_soundings(params, arrays, n_blocks, seed, power):
    rng = np.random.default_rng(seed)
    omegas = np.stack(
        [random_phase_shifts(rng, arrays.ris.n_elements) for _ in range(n_blocks)]
    )
    pilots = make_pilots(arrays.ue.n_elements, power)
    noise_rngs = [np.random.default_rng((seed, 7, i)) for i in range(n_blocks)]
    return collect_soundings(params, omegas, pilots, arrays, noise_rngs=noise_rngs)


def test_theta_scan_recovers_reference_angle_noiseless():
    params = reference_params()
    arrays = reference_arrays()
    soundings = _noiseless_soundings(params, arrays, 2, seed=21)
    theta, spectrum = estimate_theta_u(soundings.coarse, arrays.ue)
    assert abs(np.rad2deg(theta) - 40.0) <= 0.05
    assert spectrum.values.argmax() == spectrum.peak_index


def test_theta_scan_works_from_a_single_block():
    params = reference_params()
    arrays = reference_arrays()
    soundings = _noiseless_soundings(params, arrays, 2, seed=22)
    theta, _ = estimate_theta_u(soundings.coarse[:1], arrays.ue)
    assert abs(np.rad2deg(theta) - 40.0) <= 0.05


def test_theta_scan_accuracy_under_noise():
    # At unit power the per-entry observation error has variance 8 while the
    # signal entries carry |c|^2 ~ 64, so a 1 degree miss is many standard
    # errors out; allow at most a couple of heavy-tail excursions in 50.
    params = reference_params()
    arrays = reference_arrays()
    hits = 0
    for trial in range(50):
        soundings = _noisy_soundings(params, arrays, 3, seed=(23, trial), power=1.0)
        theta, _ = estimate_theta_u(soundings.coarse, arrays.ue)
        hits += abs(np.rad2deg(theta) - 40.0) <= 1.0
    assert hits >= 48


def test_coupling_matches_effective_gain_noiseless():
    params = reference_params(gain=0.3 - 0.8j)
    arrays = reference_arrays()
    rng = np.random.default_rng(24)
    for _ in range(5):
        omega = random_phase_shifts(rng, arrays.ris.n_elements)
        h = cascaded_channel(params, omega, arrays)
        c_hat = estimate_coupling(h, params.theta_b, params.theta_u, arrays.bs, arrays.ue)
        c_true = effective_gain(params, omega, arrays)
        assert abs(c_hat - c_true) <= 1e-12 * abs(c_true)


def test_coupling_is_linear_in_the_block():
    params = reference_params()
    arrays = reference_arrays()
    rng = np.random.default_rng(25)
    block = rng.normal(size=(12, 8)) + 1j * rng.normal(size=(12, 8))
    c = estimate_coupling(block, params.theta_b, params.theta_u, arrays.bs, arrays.ue)
    c2 = estimate_coupling(
        (2.0 - 1.0j) * block, params.theta_b, params.theta_u, arrays.bs, arrays.ue
    )
    assert c2 == pytest.approx((2.0 - 1.0j) * c, rel=1e-12)
    zero = estimate_coupling(
        np.zeros((12, 8)), params.theta_b, params.theta_u, arrays.bs, arrays.ue
    )
    assert zero == 0.0


def test_null_system_annihilates_the_surface_response():
    params = reference_params(gain=np.exp(0.7j))
    arrays = reference_arrays()
    rng = np.random.default_rng(26)
    for n_blocks in (2, 4):
        omegas = np.stack(
            [random_phase_shifts(rng, arrays.ris.n_elements) for _ in range(n_blocks)]
        )
        couplings = np.array([effective_gain(params, w, arrays) for w in omegas])
        rows = build_null_system(
            couplings, omegas, params.phi_b, params.psi_b, arrays.ris
        )
        assert rows.shape == (n_blocks - 1, arrays.ris.n_elements)
        a_ru = upa_response(params.phi_u, params.psi_u, arrays.ris)
        slack = np.abs(rows @ a_ru)
        bound = 1e-10 * np.linalg.norm(rows, axis=1) * np.linalg.norm(a_ru)
        assert np.all(slack <= bound)
        assert np.linalg.matrix_rank(rows) == n_blocks - 1


def test_null_system_scales_linearly_with_couplings():
    arrays = reference_arrays()
    params = reference_params()
    rng = np.random.default_rng(27)
    omegas = np.stack([random_phase_shifts(rng, 64) for _ in range(3)])
    couplings = rng.normal(size=3) + 1j * rng.normal(size=3)
    base = build_null_system(couplings, omegas, params.phi_b, params.psi_b, arrays.ris)
    scaled = build_null_system(
        5j * couplings, omegas, params.phi_b, params.psi_b, arrays.ris
    )
    np.testing.assert_allclose(scaled, 5j * base, rtol=1e-12)


def test_null_system_input_validation():
    arrays = reference_arrays()
    params = reference_params()
    omegas = np.ones((2, 64), dtype=complex)
    with pytest.raises(InsufficientSoundingsError):
        build_null_system(
            np.ones(1, dtype=complex), omegas[:1], params.phi_b, params.psi_b, arrays.ris
        )
    with pytest.raises(ConfigurationError):
        build_null_system(
            np.ones(2, dtype=complex),
            np.ones((2, 16), dtype=complex),
            params.phi_b,
            params.psi_b,
            arrays.ris,
        )
    with pytest.raises(ConfigurationError):
        build_null_system(
            np.ones(2, dtype=complex), omegas, params.phi_b, params.psi_b, arrays.ris,
            ref_index=5,
        )


def test_reference_block_choice_does_not_change_the_answer():
    # Rows built against reference r are linear combinations of the rows
    # built against reference 0, so the row space, the projection basis, and
    # the whole spectrum are invariant to the pairing choice.
    params = reference_params(gain=np.exp(-1.1j))
    arrays = reference_arrays()
    soundings = _noisy_soundings(params, arrays, 5, seed=29, power=1.0)
    first = estimate_channel(
        soundings, params.theta_b, params.phi_b, params.psi_b, arrays
    )
    strongest = estimate_channel(
        soundings, params.theta_b, params.phi_b, params.psi_b, arrays,
        ref_policy="strongest",
    )
    assert int(np.argmax(np.abs(first.couplings))) != 0
    assert strongest.phi_u_hat == pytest.approx(first.phi_u_hat, abs=1e-8)
    assert strongest.psi_u_hat == pytest.approx(first.psi_u_hat, abs=1e-8)
    np.testing.assert_allclose(
        strongest.ris_spectrum.values, first.ris_spectrum.values, rtol=1e-6
    )


def test_estimate_channel_rejects_unknown_ref_policy():
    params = reference_params()
    arrays = reference_arrays()
    soundings = _noiseless_soundings(params, arrays, 2, seed=29)
    with pytest.raises(ConfigurationError):
        estimate_channel(
            soundings, params.theta_b, params.phi_b, params.psi_b, arrays,
            ref_policy="weakest",
        )


def test_ris_scan_recovers_reference_angles_noiseless():
    params = reference_params()
    arrays = reference_arrays()
    rng = np.random.default_rng(30)
    omegas = np.stack([random_phase_shifts(rng, 64) for _ in range(2)])
    couplings = np.array([effective_gain(params, w, arrays) for w in omegas])
    rows = build_null_system(couplings, omegas, params.phi_b, params.psi_b, arrays.ris)
    phi, psi, spectrum = estimate_ris_angles(rows, arrays.ris)
    assert abs(np.rad2deg(phi) - 50.0) <= 0.05
    assert abs(np.rad2deg(psi) - 30.0) <= 0.05
    # both reference angles sit on the coarse lattice, so the coarse peak
    # must land on their exact cell
    assert spectrum.peak_index == (100, 60)
    np.testing.assert_allclose(np.rad2deg(spectrum.phi_axis[100]), 50.0, atol=1e-9)
    np.testing.assert_allclose(np.rad2deg(spectrum.psi_axis[60]), 30.0, atol=1e-9)


def test_ris_scan_rejects_all_zero_system():
    arrays = reference_arrays()
    with pytest.raises(EstimationError):
        estimate_ris_angles(np.zeros((1, 64), dtype=complex), arrays.ris)


def test_flat_spectrum_tie_breaks_to_smallest_angles():
    # A one-hot row makes the projection power identically 1, so every grid
    # point ties; the first flat maximum wins, i.e. smallest azimuth then
    # smallest elevation.
    arrays = reference_arrays()
    row = np.zeros((1, 64), dtype=complex)
    row[0, 0] = 1.0
    phi, psi, spectrum = estimate_ris_angles(row, arrays.ris)
    assert spectrum.peak_index == (0, 0)
    assert phi == 0.0
    assert psi == 0.0


def test_gain_noiseless_exact():
    params = reference_params(gain=0.6 * np.exp(2.3j))
    arrays = reference_arrays()
    soundings = _noiseless_soundings(params, arrays, 3, seed=31)
    g = estimate_gain(
        soundings.coarse,
        soundings.omegas,
        params.theta_b,
        params.phi_b,
        params.psi_b,
        params.theta_u,
        params.phi_u,
        params.psi_u,
        arrays,
    )
    assert abs(g - params.gain) <= 1e-10 * abs(params.gain)


def test_gain_solves_the_least_squares_problem():
    # Fit quality is checked against an independent numeric minimizer of the
    # same quadratic objective, plus direct perturbation optimality.
    params = reference_params(gain=np.exp(0.4j))
    arrays = reference_arrays()
    soundings = _noisy_soundings(params, arrays, 4, seed=32, power=1.0)
    g_hat = estimate_gain(
        soundings.coarse,
        soundings.omegas,
        params.theta_b,
        params.phi_b,
        params.psi_b,
        params.theta_u,
        params.phi_u,
        params.psi_u,
        arrays,
    )
    a_b = ula_response_at(params.theta_b, arrays.bs)
    a_u = ula_response_at(params.theta_u, arrays.ue)
    a_rb = upa_response(params.phi_b, params.psi_b, arrays.ris)
    a_ru = upa_response(params.phi_u, params.psi_u, arrays.ris)
    scalars = np.array([np.sum(a_rb.conj() * w * a_ru) for w in soundings.omegas])
    observed = soundings.coarse @ a_u
    model = 8 * scalars[:, None] * a_b

    def objective(z):
        return float(np.sum(np.abs(observed - (z[0] + 1j * z[1]) * model) ** 2))

    result = scipy.optimize.minimize(
        objective,
        [0.0, 0.0],
        method="Nelder-Mead",
        options={"xatol": 1e-13, "fatol": 1e-16, "maxiter": 20000},
    )
    assert abs(g_hat - (result.x[0] + 1j * result.x[1])) <= 1e-6
    rng = np.random.default_rng(33)
    base = objective([g_hat.real, g_hat.imag])
    for _ in range(20):
        delta = 1e-4 * (rng.normal() + 1j * rng.normal())
        assert base <= objective([(g_hat + delta).real, (g_hat + delta).imag])


def test_gain_degenerate_when_all_blocks_null_the_link():
    params = reference_params()
    arrays = reference_arrays()
    with pytest.raises(DegenerateGeometryError):
        estimate_gain(
            np.zeros((2, 12, 8), dtype=complex),
            np.zeros((2, 64), dtype=complex),
            params.theta_b,
            params.phi_b,
            params.psi_b,
            params.theta_u,
            params.phi_u,
            params.psi_u,
            arrays,
        )


def test_pipeline_noiseless_exact_for_on_grid_angles():
    # Angles on the search lattice leave no quantization residue, so the
    # noiseless pipeline must return them to machine precision.
    arrays = reference_arrays()
    rng = np.random.default_rng(34)
    for _ in range(5):
        truth = ChannelParams(
            theta_u=np.deg2rad(0.1 * rng.integers(-600, 601)),
            theta_b=np.deg2rad(40.0),
            phi_u=np.deg2rad(0.5 * rng.integers(20, 161)),
            psi_u=np.deg2rad(0.5 * rng.integers(10, 171)),
            phi_b=np.deg2rad(50.0),
            psi_b=np.deg2rad(65.0),
            gain=np.exp(2j * np.pi * rng.random()),
        )
        soundings = _noiseless_soundings(truth, arrays, 3, seed=rng.integers(1 << 30))
        est = estimate_channel(
            soundings, truth.theta_b, truth.phi_b, truth.psi_b, arrays
        )
        assert abs(np.rad2deg(est.theta_u_hat - truth.theta_u)) <= 1e-6
        assert abs(np.rad2deg(est.phi_u_hat - truth.phi_u)) <= 1e-6
        assert abs(np.rad2deg(est.psi_u_hat - truth.psi_u)) <= 1e-6
        assert abs(est.gain_hat - truth.gain) <= 1e-9
        assert np.max(np.abs(est.residual)) <= 1e-8 * np.max(np.abs(est.couplings))


def test_angle_error_shrinks_with_power_and_blocks():
    params = reference_params()
    arrays = reference_arrays()

    def median_miss(power, n_blocks, tag):
        misses = []
        for trial in range(25):
            soundings = _noisy_soundings(
                params, arrays, n_blocks, seed=(35, tag, trial), power=power
            )
            est = estimate_channel(
                soundings, params.theta_b, params.phi_b, params.psi_b, arrays
            )
            misses.append(
                abs(np.rad2deg(est.theta_u_hat) - 40.0)
                + abs(np.rad2deg(est.phi_u_hat) - 50.0)
                + abs(np.rad2deg(est.psi_u_hat) - 30.0)
            )
        return float(np.median(misses))

    assert median_miss(10.0, 3, 0) < median_miss(0.1, 3, 1)
    assert median_miss(1.0, 6, 2) < median_miss(1.0, 2, 3)


def test_reconstruct_channel_round_trips_noiseless_estimates():
    params = reference_params(gain=np.exp(-0.2j))
    arrays = reference_arrays()
    soundings = _noiseless_soundings(params, arrays, 2, seed=36)
    est = estimate_channel(soundings, params.theta_b, params.phi_b, params.psi_b, arrays)
    rng = np.random.default_rng(37)
    omega = random_phase_shifts(rng, 64)
    h_hat = reconstruct_channel(
        est, omega, params.theta_b, params.phi_b, params.psi_b, arrays
    )
    h_true = cascaded_channel(params, omega, arrays)
    num, den = frobenius_error_terms(h_hat, h_true)
    assert num <= 1e-18 * den
    assert np.linalg.matrix_rank(h_hat) <= 1
