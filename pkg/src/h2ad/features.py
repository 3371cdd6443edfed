"""Statistical eigenvalue features for the supervised source counters.

Five log-compressed statistics summarize a pooled eigenvalue spectrum: log of
the max, min, standard deviation and mean, plus the spectral entropy of the
normalized eigenvalue distribution.  Entropy grows monotonically with the
number of sources spreading energy across the spectrum, which is what makes
it the discriminating fifth feature.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .base import as_float_vector

__all__ = ["FeatureVector", "extract_features"]

_LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class FeatureVector:
    log_max: float
    log_min: float
    log_std: float
    log_mean: float
    entropy: float

    def as_array(self, include_entropy: bool = True) -> np.ndarray:
        base = [self.log_max, self.log_min, self.log_std, self.log_mean]
        if include_entropy:
            base.append(self.entropy)
        return np.array(base, dtype=np.float64)


def extract_features(eigenvalues) -> FeatureVector:
    """Compute the five spectrum statistics.

    Eigenvalues of a noisy sample covariance are positive almost surely;
    non-positive inputs are clamped to 1e-300 before the logs (with a warning)
    so the features stay finite.
    """
    vals = as_float_vector(eigenvalues, "eigenvalues")
    if vals.size < 2:
        raise ValueError("need at least two eigenvalues")
    if np.any(vals <= 0):
        warnings.warn("non-positive eigenvalues clamped for log features",
                      stacklevel=2)
        vals = np.maximum(vals, _LOG_FLOOR)
    std = max(vals.std(), _LOG_FLOOR)
    p = vals / vals.sum()
    entropy = float(-(p * np.log(p)).sum())
    return FeatureVector(
        log_max=float(np.log(vals.max())),
        log_min=float(np.log(vals.min())),
        log_std=float(np.log(std)),
        log_mean=float(np.log(vals.mean())),
        entropy=entropy,
    )
