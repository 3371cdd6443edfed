"""Sample covariance and Hermitian eigendecomposition.

Both sensing stages run off the eigen-spectrum of the per-group sample
covariance R = Y Y^H / T.  ``hermitian_eig`` returns eigenvalues in descending
order with a deterministic eigenvector phase convention (largest-magnitude
component real-positive) so repeated runs and cross-implementation comparisons
are stable.  ``jacobi_eig`` is an independent cyclic-Jacobi solver kept for
cross-checking the LAPACK-backed path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import as_complex_matrix
from .exceptions import NumericError
from .simulate import SnapshotMatrix

__all__ = ["CovarianceMatrix", "EigenSpectrum", "sample_covariance",
           "hermitian_eig", "jacobi_eig"]

JACOBI_DIM_CAP = 256


@dataclass(frozen=True)
class CovarianceMatrix:
    """Hermitian sample or model covariance (symmetrized at construction)."""

    data: np.ndarray
    snapshot_count: int
    group: int = 0

    def __post_init__(self):
        d = as_complex_matrix(self.data, "covariance")
        if d.shape[0] != d.shape[1]:
            raise ValueError(f"covariance must be square, got {d.shape}")
        d = 0.5 * (d + d.conj().T)
        d.flags.writeable = False
        object.__setattr__(self, "data", d)

    @property
    def dim(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class EigenSpectrum:
    """Descending real eigenvalues and the matching unitary eigenvector basis."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    group: int = 0

    def __post_init__(self):
        vals = np.asarray(self.eigenvalues, dtype=np.float64)
        vecs = np.asarray(self.eigenvectors, dtype=np.complex128)
        vals.flags.writeable = False
        vecs.flags.writeable = False
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size


def sample_covariance(y: SnapshotMatrix | np.ndarray, group: int | None = None
                      ) -> CovarianceMatrix:
    """R = Y Y^H / T, symmetrized."""
    if isinstance(y, SnapshotMatrix):
        data, grp = y.data, y.group
    else:
        data, grp = as_complex_matrix(y, "snapshots"), group or 0
    if data.size == 0:
        raise ValueError("empty snapshot matrix")
    t = data.shape[1]
    return CovarianceMatrix(data @ data.conj().T / t, t, grp)


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    out = vecs.copy()
    idx = np.argmax(np.abs(out), axis=0)
    pivots = out[idx, np.arange(out.shape[1])]
    mags = np.abs(pivots)
    mags[mags == 0] = 1.0
    out *= (pivots.conj() / mags)[None, :]
    return out


def hermitian_eig(r: CovarianceMatrix | np.ndarray) -> EigenSpectrum:
    """Eigendecomposition R = U diag(lambda) U^H, eigenvalues descending."""
    if isinstance(r, CovarianceMatrix):
        data, grp = r.data, r.group
    else:
        data, grp = as_complex_matrix(r, "matrix"), 0
        data = 0.5 * (data + data.conj().T)
    if not np.all(np.isfinite(data.view(np.float64))):
        raise NumericError("covariance contains non-finite entries")
    vals, vecs = np.linalg.eigh(data)
    order = np.arange(vals.size)[::-1]  # descending, stable for ties
    return EigenSpectrum(vals[order], _fix_phases(vecs[:, order]), grp)


def jacobi_eig(h: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60
               ) -> EigenSpectrum:
    """Cyclic Jacobi eigendecomposition for complex Hermitian matrices.

    Kept independent of the LAPACK route so the two can cross-validate each
    other.  O(n^3) per sweep; dimension capped at 256.
    """
    a = as_complex_matrix(h, "matrix").copy()
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("matrix must be square")
    if n > JACOBI_DIM_CAP:
        raise ValueError(f"jacobi_eig is capped at {JACOBI_DIM_CAP}x{JACOBI_DIM_CAP}")
    if not np.all(np.isfinite(a.view(np.float64))):
        raise NumericError("matrix contains non-finite entries")
    a = 0.5 * (a + a.conj().T)
    u = np.eye(n, dtype=np.complex128)
    scale = max(np.linalg.norm(a), 1e-300)

    for _ in range(max_sweeps):
        off = np.sqrt(max(np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2), 0.0))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                hpq = a[p, q]
                if abs(hpq) <= 1e-300:
                    continue
                phi = np.angle(hpq)
                m = abs(hpq)
                theta = 0.5 * np.arctan2(2.0 * m, (a[p, p] - a[q, q]).real)
                c, s = np.cos(theta), np.sin(theta)
                ep = np.exp(1j * phi)
                # columns of the 2x2 unitary: (e^{j phi} c, s), (-e^{j phi} s, c)
                col_p = a[:, p] * (ep * c) + a[:, q] * s
                col_q = a[:, p] * (-ep * s) + a[:, q] * c
                a[:, p], a[:, q] = col_p, col_q
                row_p = a[p, :] * (ep.conj() * c) + a[q, :] * s
                row_q = a[p, :] * (-ep.conj() * s) + a[q, :] * c
                a[p, :], a[q, :] = row_p, row_q
                up = u[:, p] * (ep * c) + u[:, q] * s
                uq = u[:, p] * (-ep * s) + u[:, q] * c
                u[:, p], u[:, q] = up, uq

    vals = np.real(np.diag(a))
    order = np.argsort(-vals, kind="stable")
    return EigenSpectrum(vals[order], _fix_phases(u[:, order]))
