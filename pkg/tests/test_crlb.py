import math

import numpy as np
import pytest

from h2ad import (ArrayConfig, SourceScene, covariance_derivative, crlb, fim,
                  generate_group_snapshots, model_covariance,
                  orthogonality_profile, sample_covariance)
from h2ad.exceptions import IllPosedSceneError


def scene_at(snr_db, angles=(11.0, 23.0), snapshots=200, seed=0):
    return SourceScene(angles=tuple(math.radians(a) for a in angles),
                       signal_power=10 ** (snr_db / 10.0), noise_power=1.0,
                       num_snapshots=snapshots, seed=seed)


def test_model_covariance_no_sources_is_identity(doa_array):
    # zero sources cannot be expressed through SourceScene; drive the model
    # with a vanishing signal power instead
    scene = scene_at(-300.0)
    r = model_covariance(doa_array, scene, 1)
    np.testing.assert_allclose(r.data, np.eye(16), atol=1e-12)
    r_full = model_covariance(doa_array, scene, 1, combined=False)
    np.testing.assert_allclose(r_full.data, np.eye(112), atol=1e-12)


def test_model_covariance_trace_single_source(doa_array):
    # fully-digital model with identity phases: trace = snr*N_q + N_q
    scene = scene_at(3.0, angles=(17.0,))
    snr = scene.signal_power
    for q, n in zip((1, 2, 3), doa_array.group_sizes):
        r = model_covariance(doa_array, scene, q, combined=False)
        assert np.trace(r.data).real == pytest.approx(snr * n + n, rel=1e-12)


def test_model_covariance_matches_simulation(doa_array):
    # Monte Carlo consistency at T = 1e5 for both observation models
    scene = SourceScene(angles=(math.radians(11), math.radians(23)),
                        signal_power=1.0, noise_power=1.0,
                        num_snapshots=100_000, seed=11)
    for combined in (True, False):
        snap = generate_group_snapshots(doa_array, scene, 1,
                                        fully_digital=not combined,
                                        global_position=True)
        empirical = sample_covariance(snap).data
        model = model_covariance(doa_array, scene, 1, combined=combined).data
        rel = np.linalg.norm(empirical - model) / np.linalg.norm(model)
        assert rel < 0.03


def test_derivative_matches_finite_differences(doa_array):
    scene = scene_at(0.0)
    h = 1e-6
    for combined in (True, False):
        for q in (1, 2, 3):
            for i, base in enumerate((11.0, 23.0)):
                analytic = covariance_derivative(doa_array, scene, q, i,
                                                 combined=combined)
                up = scene_at(0.0, angles=(11.0, 23.0))
                angles_up = list(up.angles)
                angles_dn = list(up.angles)
                angles_up[i] += h
                angles_dn[i] -= h
                r_up = model_covariance(
                    doa_array, SourceScene(tuple(angles_up), up.signal_power,
                                           up.noise_power, up.num_snapshots,
                                           up.seed), q, combined).data
                r_dn = model_covariance(
                    doa_array, SourceScene(tuple(angles_dn), up.signal_power,
                                           up.noise_power, up.num_snapshots,
                                           up.seed), q, combined).data
                fd = (r_up - r_dn) / (2 * h)
                rel = np.linalg.norm(analytic - fd) / np.linalg.norm(analytic)
                assert rel < 1e-6


def test_derivative_is_hermitian_and_vanishes_at_endfire(doa_array):
    scene = scene_at(0.0)
    d = covariance_derivative(doa_array, scene, 2, 0)
    np.testing.assert_allclose(d, d.conj().T, atol=1e-14)
    near_endfire = scene_at(0.0, angles=(89.99999, 23.0))
    d_end = covariance_derivative(doa_array, near_endfire, 2, 0)
    assert np.linalg.norm(d_end) < np.linalg.norm(d) * 1e-5


def test_fim_symmetric_psd_random_scenes(doa_array):
    rng = np.random.default_rng(1)
    for _ in range(100):
        count = int(rng.integers(1, 4))
        angles = np.sort(rng.uniform(-55, 55, count))
        while count > 1 and np.min(np.diff(angles)) < 3.0:
            angles = np.sort(rng.uniform(-55, 55, count))
        scene = scene_at(float(rng.uniform(-10, 10)), angles=tuple(angles))
        info = fim(doa_array, scene)
        np.testing.assert_allclose(info.matrix, info.matrix.T, atol=1e-10)
        eigs = np.linalg.eigvalsh(info.matrix)
        assert eigs[0] >= -1e-9 * max(eigs[-1], 1.0)
        assert len(info.per_group) == 3


def test_fim_single_source_positive(doa_array):
    scene = scene_at(0.0, angles=(17.0,))
    info = fim(doa_array, scene)
    assert info.matrix.shape == (1, 1)
    assert info.matrix[0, 0] > 0


def test_fim_off_diagonal_coherence_decays_with_aperture():
    # the steering vectors of distinct angles become asymptotically
    # orthogonal, so the normalized cross term shrinks as groups grow
    coherences = []
    for k in (2, 8, 32):
        cfg = ArrayConfig(num_groups=3, subarrays_per_group=k,
                          antennas_per_subarray=(7, 13, 17))
        info = fim(cfg, scene_at(0.0), combined=False).matrix
        coherences.append(abs(info[0, 1]) / math.sqrt(info[0, 0] * info[1, 1]))
    assert coherences[0] > coherences[1] > coherences[2]
    assert coherences[-1] < 0.05


def test_fim_matches_slow_reference(doa_array):
    # independent evaluator: explicit inverses and matrix products
    scene = scene_at(0.0)
    info = fim(doa_array, scene).matrix
    slow = np.zeros((2, 2))
    for q in (1, 2, 3):
        r = model_covariance(doa_array, scene, q).data
        r_inv = np.linalg.inv(r)
        ds = [covariance_derivative(doa_array, scene, q, i) for i in (0, 1)]
        for p in range(2):
            for s in range(2):
                slow[p, s] += np.real(np.trace(r_inv @ ds[p] @ r_inv @ ds[s]))
    np.testing.assert_allclose(info, slow, rtol=1e-9)


def test_crlb_scales_exactly_inverse_snapshots(doa_array):
    scene = scene_at(0.0)
    b200 = np.array(crlb(doa_array, scene, 200).bounds)
    b100 = np.array(crlb(doa_array, scene, 100).bounds)
    np.testing.assert_array_equal(b100, 2.0 * b200)


def test_crlb_monotone_in_snr(doa_array):
    bounds = [np.array(crlb(doa_array, scene_at(snr), 200).bounds)
              for snr in np.arange(-20.0, 10.1, 2.5)]
    for lo, hi in zip(bounds, bounds[1:]):
        assert np.all(hi < lo)


def test_crlb_diagonal_approximation_close(doa_array):
    scene = scene_at(0.0)
    full = np.array(crlb(doa_array, scene, 200).bounds)
    diag = np.array(crlb(doa_array, scene, 200, diagonal_approx=True).bounds)
    np.testing.assert_allclose(full, diag, rtol=0.05)
    assert np.all(diag <= full + 1e-18)


def test_crlb_symmetric_scene_even(doa_array):
    scene = scene_at(0.0, angles=(-15.0, 15.0))
    bounds = crlb(doa_array, scene, 200).bounds
    assert bounds[0] == pytest.approx(bounds[1], rel=1e-9)


def test_crlb_duplicate_angles_ill_posed(doa_array):
    scene = SourceScene(angles=(math.radians(11), math.radians(11) + 1e-12),
                        signal_power=1.0, noise_power=1.0, num_snapshots=200,
                        seed=0)
    with pytest.raises(IllPosedSceneError):
        crlb(doa_array, scene, 200)


def test_orthogonality_profile_coinciding_angles(doa_array):
    theta = math.radians(11)
    out = orthogonality_profile(doa_array, theta, theta, [1, 10, 100, 10_000])
    np.testing.assert_array_equal(out, 1.0)


def test_orthogonality_profile_matches_direct_sum(doa_array):
    tp, tr = math.radians(11), math.radians(23)
    ns = [3, 29, 97, 1000, 10_000]
    closed = orthogonality_profile(doa_array, tp, tr, ns)
    delta = math.pi * (math.sin(tr) - math.sin(tp))
    for n, got in zip(ns, closed):
        direct = abs(np.sum(np.exp(1j * delta * np.arange(n)))) / n
        assert got == pytest.approx(direct, abs=1e-12)


def test_orthogonality_profile_decays(doa_array):
    tp, tr = math.radians(11), math.radians(23)
    ns = [10, 100, 1000, 10_000]
    vals = orthogonality_profile(doa_array, tp, tr, ns)
    delta = math.pi * (math.sin(tr) - math.sin(tp))
    bound = 2.0 / (np.array(ns) * abs(1 - np.exp(1j * delta)))
    assert np.all(vals <= bound + 1e-15)
    assert vals[-1] < 1e-3
