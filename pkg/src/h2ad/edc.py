"""Eigen-domain clustering (EDC) estimator of the number of sources.

Per group, the covariance eigenvalues are z-scored with the population
standard deviation, lifted to 2-D points (z, sign(z)*|z|^epsilon) to stretch
the signal/noise separation, and pooled over all groups.  DBSCAN then finds
one dominant dense cluster -- the noise eigenvalues of every group collapse
near the origin -- and everything outside it (including DBSCAN noise points,
which are precisely the far-out signal eigenvalues) is counted as signal:
the source count is round(|signal points| / Q).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .base import ParamsMixin, as_float_vector
from .exceptions import DegenerateSpectrumWarning
from .spectral import EigenSpectrum

__all__ = ["NOISE", "LiftedPoint", "ClusterLabeling", "standardize", "lift",
           "dbscan", "estimate_count_edc", "edc_analysis", "EdcSourceCounter"]

NOISE = -1


@dataclass(frozen=True)
class LiftedPoint:
    """One standardized eigenvalue lifted to 2-D, tagged by its origin."""

    x: float
    y: float
    group: int
    eigen_index: int


@dataclass(frozen=True)
class ClusterLabeling:
    """DBSCAN output: per-point cluster id (NOISE = -1) and core-point flags."""

    labels: np.ndarray
    core: np.ndarray

    def cluster_sizes(self) -> dict[int, int]:
        ids, counts = np.unique(self.labels[self.labels != NOISE], return_counts=True)
        return dict(zip(ids.tolist(), counts.tolist()))


def standardize(eigenvalues) -> np.ndarray:
    """z-score with the population standard deviation.

    A zero-variance spectrum (all eigenvalues equal) carries no separation
    information; it yields all-zero scores and a DegenerateSpectrumWarning.
    """
    vals = as_float_vector(eigenvalues, "eigenvalues")
    if vals.size < 2:
        raise ValueError("standardize needs at least two eigenvalues")
    mu = vals.mean()
    sigma = vals.std()  # population (1/N) convention
    if sigma == 0.0:
        warnings.warn("all eigenvalues equal; returning zero scores",
                      DegenerateSpectrumWarning, stacklevel=2)
        return np.zeros_like(vals)
    return (vals - mu) / sigma


def lift(z, exponent: float = 2.0, group: int = 0) -> list[LiftedPoint]:
    """Map each score z to (z, sign(z)*|z|^exponent)."""
    if exponent < 1:
        raise ValueError(f"exponent must be >= 1, got {exponent}")
    z = as_float_vector(z, "z")
    y = np.sign(z) * np.abs(z) ** exponent
    return [LiftedPoint(float(zi), float(yi), group, j)
            for j, (zi, yi) in enumerate(zip(z, y))]


def dbscan(points, eps: float, min_pts: int) -> ClusterLabeling:
    """Plain DBSCAN with the Euclidean metric.

    Core points have >= min_pts neighbors within eps (self included); clusters
    are density-connected components grown in input order, so border points
    join the first core that reaches them; the rest is NOISE.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if min_pts < 1:
        raise ValueError("min_pts must be >= 1")
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    n = pts.shape[0]
    if n == 0:
        return ClusterLabeling(np.empty(0, dtype=int), np.empty(0, dtype=bool))
    diff = pts[:, None, :] - pts[None, :, :]
    within = np.einsum("ijk,ijk->ij", diff, diff) <= eps * eps
    neighbor_counts = within.sum(axis=1)
    core = neighbor_counts >= min_pts

    labels = np.full(n, NOISE, dtype=int)
    cluster_id = 0
    for i in range(n):
        if labels[i] != NOISE or not core[i]:
            continue
        labels[i] = cluster_id
        frontier = [i]
        while frontier:
            j = frontier.pop()
            for k in np.nonzero(within[j])[0]:
                if labels[k] == NOISE:
                    labels[k] = cluster_id
                    if core[k]:
                        frontier.append(int(k))
        cluster_id += 1
    return ClusterLabeling(labels, core)


def _pooled_points(spectra, exponent: float) -> list[LiftedPoint]:
    pool: list[LiftedPoint] = []
    for gi, spec in enumerate(spectra, start=1):
        vals = spec.eigenvalues if isinstance(spec, EigenSpectrum) else spec
        pool.extend(lift(standardize(vals), exponent, group=gi))
    return pool


def edc_analysis(spectra, exponent: float = 2.0, eps: float = 1.4,
                 min_pts: int | None = None):
    """Full clustering pass: returns (count, pooled points, labeling, noise id).

    ``spectra`` is one eigenvalue vector (or EigenSpectrum) per group.
    """
    spectra = list(spectra)
    if len(spectra) == 0:
        raise ValueError("at least one group spectrum is required")
    num_groups = len(spectra)
    if min_pts is None:
        min_pts = max(4, num_groups + 1)
    pool = _pooled_points(spectra, exponent)
    if not pool:
        raise ValueError("empty eigenvalue pool")
    xy = np.array([[p.x, p.y] for p in pool])
    labeling = dbscan(xy, eps, min_pts)

    sizes = labeling.cluster_sizes()
    if sizes:
        biggest = max(sizes.values())
        # ties broken toward the cluster hugging the origin
        tied = [cid for cid, s in sizes.items() if s == biggest]
        noise_id = min(tied, key=lambda cid: (
            float(np.linalg.norm(xy[labeling.labels == cid].mean(axis=0))), cid))
        signal_count = len(pool) - sizes[noise_id]
    else:
        noise_id = NOISE  # no dense mass at all: everything counts as signal
        signal_count = len(pool)
    count = max(int(np.floor(signal_count / num_groups + 0.5)), 0)
    return count, pool, labeling, noise_id


def estimate_count_edc(spectra, exponent: float = 2.0, eps: float = 1.4,
                       min_pts: int | None = None) -> int:
    """Estimated number of sources from per-group eigen-spectra."""
    count, _, _, _ = edc_analysis(spectra, exponent, eps, min_pts)
    return count


class EdcSourceCounter(ParamsMixin):
    """Estimator-style wrapper around the clustering count.

    Unsupervised: fit is a no-op kept for pipeline compatibility.  predict
    takes a batch where each item is the sequence of per-group eigenvalue
    vectors of one observation.
    """

    def __init__(self, exponent: float = 2.0, eps: float = 1.4,
                 min_pts: int | None = None):
        self.exponent = exponent
        self.eps = eps
        self.min_pts = min_pts

    def fit(self, X=None, y=None):
        return self

    def predict_one(self, spectra) -> int:
        return estimate_count_edc(spectra, self.exponent, self.eps, self.min_pts)

    def predict(self, X) -> np.ndarray:
        return np.array([self.predict_one(spectra) for spectra in X], dtype=int)
