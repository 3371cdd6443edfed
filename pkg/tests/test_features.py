import math

import numpy as np
import pytest

from h2ad import extract_features


def test_uniform_spectrum():
    fv = extract_features(np.full(16, 2.5))
    assert fv.log_max == fv.log_min == fv.log_mean == pytest.approx(math.log(2.5))
    assert fv.log_std < -600  # guarded log of zero spread
    assert fv.entropy == pytest.approx(math.log(16), abs=1e-12)


def test_two_point_values():
    fv = extract_features([math.e, 1.0])
    assert fv.log_max == pytest.approx(1.0)
    assert fv.log_min == pytest.approx(0.0)
    assert fv.log_mean == pytest.approx(math.log((math.e + 1) / 2))


def test_entropy_hand_value():
    # -(0.9 ln 0.9 + 0.1 ln 0.1), evaluated by hand
    fv = extract_features([9.0, 1.0])
    assert fv.entropy == pytest.approx(0.3250829733914482, abs=1e-12)


def test_entropy_bounds_and_ordering():
    rng = np.random.default_rng(0)
    for _ in range(50):
        vals = rng.uniform(0.01, 10, 12)
        fv = extract_features(vals)
        assert 0.0 <= fv.entropy <= math.log(12) + 1e-12
        assert fv.log_max >= fv.log_mean >= fv.log_min


def test_entropy_vanishes_with_dominance():
    entropies = []
    for k in range(1, 7):
        vals = np.concatenate([[10.0 ** k], np.ones(9)])
        entropies.append(extract_features(vals).entropy)
    assert all(b < a for a, b in zip(entropies, entropies[1:]))
    assert entropies[-1] < 2e-4


def test_nonpositive_clamped_with_warning():
    with pytest.warns(UserWarning, match="clamped"):
        fv = extract_features([1.0, 0.0])
    assert np.isfinite(fv.log_min)


def test_feature_array_layout():
    fv = extract_features([4.0, 1.0])
    assert fv.as_array().shape == (5,)
    np.testing.assert_array_equal(fv.as_array(include_entropy=False),
                                  fv.as_array()[:4])


def test_requires_two_values():
    with pytest.raises(ValueError):
        extract_features([1.0])
