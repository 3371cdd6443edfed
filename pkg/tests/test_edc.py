import math

import numpy as np
import pytest

from h2ad import (ArrayConfig, EdcSourceCounter, SourceScene, dbscan,
                  estimate_count_edc, generate_all_groups, hermitian_eig,
                  lift, sample_covariance, standardize)
from h2ad.edc import NOISE, edc_analysis
from h2ad.exceptions import DegenerateSpectrumWarning
from h2ad.nn.dataset import sample_angles


# -- standardize -------------------------------------------------------------

def test_standardize_two_point():
    np.testing.assert_allclose(standardize([2.0, 0.0]), [1.0, -1.0])


def test_standardize_zero_mean_unit_std():
    rng = np.random.default_rng(1)
    z = standardize(rng.uniform(0.1, 50, 64))
    assert abs(z.mean()) < 1e-12
    assert z.std() == pytest.approx(1.0, abs=1e-12)


def test_standardize_degenerate_flags():
    with pytest.warns(DegenerateSpectrumWarning):
        z = standardize(np.full(8, 3.0))
    np.testing.assert_array_equal(z, 0.0)


def test_standardize_fig_regime_three_outliers(sensing_array):
    # high-SNR three-source spectrum: exactly the 3 signal scores exceed 1
    scene = SourceScene(angles=(math.radians(-25), math.radians(5),
                                math.radians(30)),
                        signal_power=10.0, num_snapshots=200, seed=9)
    snaps = generate_all_groups(sensing_array, scene, fully_digital=True)
    vals = hermitian_eig(sample_covariance(snaps[0])).eigenvalues
    z = standardize(vals)
    assert int(np.sum(z > 1.0)) == 3


# -- lift --------------------------------------------------------------------

def test_lift_fixed_points():
    assert lift([1.0], 3.0)[0].y == 1.0
    point = lift([-2.0], 2.0)[0]
    assert (point.x, point.y) == (-2.0, -4.0)  # sign-preserving power
    assert lift([2.0], 3.0)[0].y == 8.0


def test_lift_requires_exponent_at_least_one():
    with pytest.raises(ValueError):
        lift([1.0], 0.5)


def test_lift_tags_origin():
    pts = lift([0.5, -0.5], 2.0, group=4)
    assert [(p.group, p.eigen_index) for p in pts] == [(4, 0), (4, 1)]


# -- dbscan ------------------------------------------------------------------

from _reference import partition_from_labels, reference_dbscan


def partition_of(labels, points):
    return partition_from_labels(labels)


def test_dbscan_two_close_points():
    out = dbscan([[0.0, 0.0], [0.1, 0.0]], eps=0.5, min_pts=2)
    assert out.labels[0] == out.labels[1] != NOISE


def test_dbscan_isolated_point_is_noise():
    out = dbscan([[0.0, 0.0], [5.0, 5.0], [0.1, 0.0]], eps=0.5, min_pts=2)
    assert out.labels[1] == NOISE


def test_dbscan_matches_reference_on_random_sets():
    rng = np.random.default_rng(23)
    for trial in range(200):
        n = int(rng.integers(5, 60))
        pts = rng.uniform(-1, 1, size=(n, 2))
        eps = float(rng.uniform(0.05, 0.6))
        min_pts = int(rng.integers(2, 6))
        mine = dbscan(pts, eps, min_pts)
        ref_labels, ref_core = reference_dbscan(pts, eps, min_pts)
        assert partition_of(mine.labels, pts) == partition_of(ref_labels, pts)
        np.testing.assert_array_equal(mine.core, ref_core)


def test_dbscan_partition_order_invariant():
    rng = np.random.default_rng(2)
    pts = rng.uniform(-1, 1, size=(40, 2))
    base = dbscan(pts, 0.3, 4)
    perm = rng.permutation(40)
    shuffled = dbscan(pts[perm], 0.3, 4)
    base_parts, base_noise = partition_of(base.labels, pts)
    # relabel shuffled indices back to original
    inv = {pi: i for i, pi in enumerate(perm)}
    shuf_parts = {frozenset(perm[j] for j in part)
                  for part in partition_of(shuffled.labels, pts)[0]}
    shuf_noise = {perm[j] for j in partition_of(shuffled.labels, pts)[1]}
    assert shuf_parts == base_parts
    assert shuf_noise == base_noise


# -- estimate_count_edc -------------------------------------------------------

def test_count_single_group_constructed_spectrum():
    vals = np.concatenate([[100.0], np.ones(28)])
    assert estimate_count_edc([vals]) == 1


def test_count_rejects_empty():
    with pytest.raises(ValueError):
        estimate_count_edc([])


def test_count_scale_invariance(sensing_array):
    scene = SourceScene(angles=(0.2, -0.3, 0.5), signal_power=1.0,
                        num_snapshots=200, seed=5)
    snaps = generate_all_groups(sensing_array, scene, fully_digital=True)
    spectra = [hermitian_eig(sample_covariance(s)).eigenvalues for s in snaps]
    base = estimate_count_edc(spectra)
    scaled = estimate_count_edc([7.3 * v for v in spectra])
    assert base == scaled


def test_count_signal_plus_noise_partition(sensing_array):
    scene = SourceScene(angles=(0.2, -0.3, 0.5), signal_power=1.0,
                        num_snapshots=200, seed=5)
    snaps = generate_all_groups(sensing_array, scene, fully_digital=True)
    spectra = [hermitian_eig(sample_covariance(s)).eigenvalues for s in snaps]
    count, points, labeling, noise_id = edc_analysis(spectra)
    sizes = labeling.cluster_sizes()
    signal = len(points) - sizes[noise_id]
    assert signal + sizes[noise_id] == len(points)
    assert count == max(int(np.floor(signal / 3 + 0.5)), 0)


def test_count_noise_only_is_zero(sensing_array):
    hits = 0
    for trial in range(100):
        scene = SourceScene(angles=(0.1,), signal_power=1e-30, noise_power=1.0,
                            num_snapshots=200, seed=trial)
        snaps = generate_all_groups(sensing_array, scene, fully_digital=True)
        spectra = [hermitian_eig(sample_covariance(s)).eigenvalues
                   for s in snaps]
        hits += estimate_count_edc(spectra) == 0
    assert hits >= 95


def test_count_three_sources_at_10db(sensing_array):
    scene = SourceScene(angles=(math.radians(-25), math.radians(5),
                                math.radians(30)),
                        signal_power=10.0, num_snapshots=200, seed=3)
    snaps = generate_all_groups(sensing_array, scene, fully_digital=True)
    spectra = [hermitian_eig(sample_covariance(s)).eigenvalues for s in snaps]
    assert estimate_count_edc(spectra) == 3


def test_accuracy_nondecreasing_in_snr(sensing_array):
    # desk-scale monotonicity over the sweep, 100 trials per point
    accs = []
    for snr in (-20.0, -15.0, -10.0, -5.0, 0.0):
        hits = 0
        for trial in range(100):
            rng = np.random.default_rng((int(snr) + 50, trial))
            angles = sample_angles(rng, 3)
            scene = SourceScene(angles=angles, signal_power=10 ** (snr / 10),
                                num_snapshots=200, seed=trial + 1)
            snaps = generate_all_groups(sensing_array, scene, fully_digital=True)
            spectra = [hermitian_eig(sample_covariance(s)).eigenvalues
                       for s in snaps]
            hits += estimate_count_edc(spectra) == 3
        accs.append(hits / 100)
    assert all(b >= a - 0.03 for a, b in zip(accs, accs[1:]))


def test_estimator_wrapper(sensing_array):
    counter = EdcSourceCounter()
    assert counter.fit() is counter
    assert counter.get_params() == {"exponent": 2.0, "eps": 1.4,
                                    "min_pts": None}
    counter.set_params(eps=0.4)
    assert counter.eps == 0.4
    scene = SourceScene(angles=(0.2, -0.3, 0.5), signal_power=10.0,
                        num_snapshots=200, seed=3)
    snaps = generate_all_groups(sensing_array, scene, fully_digital=True)
    spectra = [hermitian_eig(sample_covariance(s)).eigenvalues for s in snaps]
    out = counter.predict([spectra, spectra])
    np.testing.assert_array_equal(out, [3, 3])
