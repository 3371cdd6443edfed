"""Per-group ESPRIT on the virtual array and ambiguity expansion.

After analog combining, group q behaves as a K-element virtual array with
inter-element spacing M_q * d (> lambda/2), so each estimated electrical phase
psi maps to several feasible directions.  The expansion inverts
psi = (2*pi/lambda) * M_q * d * sin(theta) (mod 2*pi) in the sin domain:
sin candidates s_m = (psi + 2*pi*m) * lambda / (2*pi*M_q*d) for every integer
m keeping |s_m| <= 1.  With pairwise coprime M_q the pseudo-solutions of
different groups never coincide, which is what the downstream fusion exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arrays import ArrayConfig
from .exceptions import DegenerateSubspaceError, ModelOrderError
from .simulate import SnapshotMatrix
from .spectral import hermitian_eig, sample_covariance

__all__ = ["CandidateAngle", "CandidateAngleSet", "esprit_group",
           "expand_ambiguities", "build_candidate_set"]


@dataclass(frozen=True)
class CandidateAngle:
    """One feasible direction: angle (radians) plus provenance tags."""

    angle: float
    group: int
    branch: int
    ambiguity: int  # lattice index reduced mod M_q


@dataclass(frozen=True)
class CandidateAngleSet:
    candidates: tuple[CandidateAngle, ...]
    group_counts: dict[int, int]
    num_sources: int

    def __len__(self):
        return len(self.candidates)

    def angles(self) -> np.ndarray:
        return np.array([c.angle for c in self.candidates])

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("angle_deg,group,branch,m\n")
            for c in self.candidates:
                fh.write(f"{math.degrees(c.angle):.9g},{c.group},"
                         f"{c.branch},{c.ambiguity}\n")


def esprit_group(snapshots: SnapshotMatrix, num_sources: int) -> np.ndarray:
    """Least-squares ESPRIT electrical phases, ascending, in (-pi, pi].

    Forward-backward averaging is applied for two or more sources to
    decorrelate closely spaced arrivals on the short K-element aperture.
    """
    if num_sources < 1:
        raise ModelOrderError("num_sources must be >= 1")
    k = snapshots.data.shape[0]
    if num_sources >= k:
        raise ModelOrderError(
            f"ESPRIT needs at least {num_sources + 1} outputs for "
            f"{num_sources} sources, got {k}")
    r = sample_covariance(snapshots).data
    if num_sources >= 2:
        j = np.eye(k)[::-1]
        r = 0.5 * (r + j @ r.conj() @ j)
    basis = hermitian_eig(r).eigenvectors[:, :num_sources]
    upper, lower = basis[:-1], basis[1:]
    rotation, _, rank, _ = np.linalg.lstsq(upper, lower, rcond=None)
    if rank < num_sources:
        raise DegenerateSubspaceError(
            f"signal subspace rank {rank} < {num_sources}")
    phases = np.angle(np.linalg.eigvals(rotation))
    # map -pi to +pi so the range is (-pi, pi]
    phases[phases <= -math.pi] += 2 * math.pi
    return np.sort(phases)


def expand_ambiguities(config: ArrayConfig, q: int, psi: float,
                       branch: int = 0) -> list[CandidateAngle]:
    """All candidate directions consistent with one electrical phase.

    Feasible sin values form the half-open window (-1, 1] so an exact-endfire
    phase never yields both +90 and -90 degrees; at d = lambda/2 the window
    holds exactly M_q lattice points.
    """
    config._check_group(q)
    m_q = config.antennas_per_subarray[q - 1]
    ratio = config.wavelength / (m_q * config.element_spacing)
    base = psi * ratio / (2 * math.pi)
    m_lo = math.floor((-1.0 - base) / ratio + 1e-12) + 1
    m_hi = math.floor((1.0 - base) / ratio + 1e-12)
    out = []
    for m in range(m_lo, m_hi + 1):
        s = base + m * ratio
        if abs(s) > 1.0:
            s = math.copysign(1.0, s)
        out.append(CandidateAngle(math.asin(s), q, branch, m % m_q))
    return out


def build_candidate_set(config: ArrayConfig, snapshots: list[SnapshotMatrix],
                        num_sources: int) -> CandidateAngleSet:
    """ESPRIT every group and expand every branch.

    Candidate order is canonical -- group-major, then branch, then lattice
    index -- which fixes the stream order the online fuser sees.
    """
    collected: list[CandidateAngle] = []
    group_counts: dict[int, int] = {}
    for snap in snapshots:
        phases = esprit_group(snap, num_sources)
        before = len(collected)
        for branch, psi in enumerate(phases):
            collected.extend(expand_ambiguities(config, snap.group, psi, branch))
        group_counts[snap.group] = len(collected) - before
    return CandidateAngleSet(tuple(collected), group_counts, num_sources)
