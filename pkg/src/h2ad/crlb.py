"""Multi-source Cramer-Rao lower bound for the H2AD receiver.

The bound is evaluated on the observation the receiver actually digitizes:
group q's K analog-combined RF-chain outputs, whose model covariance is

    R_q = s * sum_i (C_q a_i)(C_q a_i)^H + I_K

with s the signal-to-noise power ratio (noise normalized to unit power per
chain; the 1/sqrt(M_q) combiner weights make the combined noise white), a_i
the group steering vector carrying its global-position phase prefix, and C_q
the analog combining matrix.  ``combined=False`` switches every operation to
the fully-digital diagnostic model R_q = s * sum_i (B^H a_i)(B^H a_i)^H + I_N
with B the per-antenna phase shifts, i.e. the bound of an ideal receiver with
one ADC per antenna; it is the looser-information (smaller-variance) reference
and the one whose trace is s*N_q + N_q for a single source.

Fisher information sums per-group trace terms

    FIM[p, r] = sum_q Tr(R_q^{-1} dR_q/dtheta_p R_q^{-1} dR_q/dtheta_r)

evaluated exactly (no orthogonality shortcut); the bound on each angle is the
matching diagonal entry of FIM^{-1} / L for L snapshots.  The steering
derivative is da/dtheta = j (2 pi / lambda) d cos(theta) *
diag(global element index) * a, whose scaling the finite-difference tests pin
down.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .arrays import ArrayConfig, config_digest, steering
from .exceptions import DegenerateModelError, IllPosedSceneError
from .simulate import SourceScene, combining_matrix
from .spectral import CovarianceMatrix

__all__ = ["FimMatrix", "CrlbResult", "model_covariance",
           "covariance_derivative", "fim", "crlb", "orthogonality_profile"]

_COND_WARN = 1e12


@dataclass(frozen=True)
class FimMatrix:
    """A x A Fisher information with the per-group contributions retained."""

    matrix: np.ndarray
    per_group: tuple[np.ndarray, ...]

    @property
    def num_sources(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class CrlbResult:
    """Per-angle variance bounds (radians^2) at a given snapshot count."""

    bounds: tuple[float, ...]
    snapshots: int
    config_hash: str

    def bounds_deg2(self) -> np.ndarray:
        return np.array(self.bounds) * (180.0 / math.pi) ** 2


def _snr_linear(scene: SourceScene) -> float:
    if scene.noise_power <= 0:
        raise DegenerateModelError("noise power must be positive")
    return scene.signal_power / scene.noise_power


def _front_end(config: ArrayConfig, q: int, combined: bool) -> np.ndarray:
    """Rows mapping antenna signals to the modeled observation."""
    if combined:
        return combining_matrix(config, q)
    return np.diag(np.exp(-1j * config.phases(q).ravel()))


def model_covariance(config: ArrayConfig, scene: SourceScene, q: int,
                     combined: bool = True) -> CovarianceMatrix:
    """Analytic covariance of group q under the unit-noise model."""
    s = _snr_linear(scene)
    front = _front_end(config, q, combined)
    cols = front @ np.column_stack(
        [steering(config, q, theta, global_position=True).entries
         for theta in scene.angles])
    data = s * (cols @ cols.conj().T) + np.eye(front.shape[0])
    return CovarianceMatrix(data, scene.num_snapshots, q)


def covariance_derivative(config: ArrayConfig, scene: SourceScene, q: int,
                          source_index: int, combined: bool = True
                          ) -> np.ndarray:
    """dR_q/dtheta_i (Hermitian); ``source_index`` indexes scene.angles."""
    theta = scene.angles[source_index]
    s = _snr_linear(scene)
    front = _front_end(config, q, combined)
    a = steering(config, q, theta, global_position=True).entries
    positions = config.group_offset(q) + np.arange(a.size)
    scale = 2.0 * math.pi * config.element_spacing / config.wavelength
    a_dot = 1j * scale * math.cos(theta) * positions * a
    u = front @ a_dot
    v = front @ a
    outer = np.outer(u, v.conj())
    return s * (outer + outer.conj().T)


def fim(config: ArrayConfig, scene: SourceScene, combined: bool = True
        ) -> FimMatrix:
    """Exact Fisher information (per snapshot) summed over groups."""
    num_sources = scene.num_sources
    per_group = []
    total = np.zeros((num_sources, num_sources))
    for q in range(1, config.num_groups + 1):
        r = model_covariance(config, scene, q, combined).data
        eigs = np.linalg.eigvalsh(r)
        if eigs[-1] / max(eigs[0], 1e-300) > _COND_WARN:
            warnings.warn(f"group {q} covariance condition number exceeds "
                          f"{_COND_WARN:g}; bound may be inaccurate",
                          stacklevel=2)
        whitened = [np.linalg.solve(
            r, covariance_derivative(config, scene, q, i, combined))
            for i in range(num_sources)]
        g = np.zeros((num_sources, num_sources))
        for p in range(num_sources):
            for r_idx in range(p, num_sources):
                val = float(np.real(np.trace(whitened[p] @ whitened[r_idx])))
                g[p, r_idx] = g[r_idx, p] = val
        per_group.append(g)
        total += g
    return FimMatrix(0.5 * (total + total.T), tuple(per_group))


def crlb(config: ArrayConfig, scene: SourceScene, snapshots: int,
         diagonal_approx: bool = False, combined: bool = True) -> CrlbResult:
    """Variance bounds: diag(FIM^{-1}) / L, or 1 / (L * FIM_ii) when the
    diagonal (asymptotic-orthogonality) approximation is requested."""
    if snapshots < 1:
        raise ValueError("snapshots must be >= 1")
    info = fim(config, scene, combined).matrix
    if diagonal_approx:
        diag = np.diag(info)
        if np.any(diag <= 0):
            raise IllPosedSceneError("non-positive Fisher diagonal")
        bounds = 1.0 / (snapshots * diag)
    else:
        eigs = np.linalg.eigvalsh(info)
        if eigs[0] <= 0 or eigs[-1] / eigs[0] > 1e14:
            raise IllPosedSceneError(
                "Fisher information is singular (duplicate or degenerate angles?)")
        bounds = np.diag(np.linalg.inv(info)) / snapshots
    return CrlbResult(tuple(float(b) for b in bounds), snapshots,
                      config_digest(config))


def orthogonality_profile(config: ArrayConfig, theta_p: float, theta_r: float,
                          n_values: Sequence[int]) -> np.ndarray:
    """Normalized steering inner product (1/N)|a^H(theta_p) a(theta_r)|.

    Closed form |1 - e^{jN Delta}| / (N |1 - e^{j Delta}|) with
    Delta = (2 pi d / lambda)(sin theta_r - sin theta_p); identically 1 for
    coinciding angles and vanishing as N grows otherwise.
    """
    delta = (2.0 * math.pi * config.element_spacing / config.wavelength
             * (math.sin(theta_r) - math.sin(theta_p)))
    out = []
    denom = abs(1.0 - np.exp(1j * delta))
    for n in n_values:
        if n < 1:
            raise ValueError("antenna counts must be >= 1")
        if denom < 1e-15:
            out.append(1.0)
        else:
            out.append(abs(1.0 - np.exp(1j * n * delta)) / (n * denom))
    return np.array(out)
