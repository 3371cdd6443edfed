"""Synthetic multi-source narrowband snapshots through the H2AD analog chain.

Sources are i.i.d. circular complex Gaussian (the stochastic model the CRLB
assumes), noise is i.i.d. circular complex Gaussian per antenna, and the
analog combiner averages each subarray with a 1/sqrt(M_q) factor so identity
phase settings preserve unit noise variance per RF chain.

Randomness comes from numpy's PCG64 generator keyed by SeedSequence entropy
(seed, stream); runs reproduce bit-exactly within one numpy build, and
statistically across builds.  Stream 0 carries the shared source matrix,
stream q the noise of group q, so every group sees the same sources.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .arrays import ArrayConfig, steering
from .exceptions import ModelOrderError

__all__ = ["SourceScene", "SnapshotMatrix", "generate_group_snapshots",
           "generate_all_groups", "generate_full_array", "combining_matrix",
           "write_snapshots", "read_snapshots"]

_SNAP_MAGIC = b"H2ADSNAP"


@dataclass(frozen=True)
class SourceScene:
    """Far-field narrowband scene: angles (radians), powers (linear), snapshots."""

    angles: tuple[float, ...]
    signal_power: float = 1.0
    noise_power: float = 1.0
    num_snapshots: int = 200
    seed: int = 0

    def __post_init__(self):
        angles = tuple(float(a) for a in np.atleast_1d(self.angles))
        object.__setattr__(self, "angles", angles)
        if len(angles) < 1:
            raise ValueError("at least one source angle is required")
        if len(set(angles)) != len(angles):
            raise ValueError("source angles must be pairwise distinct")
        if not (self.signal_power > 0 and self.noise_power > 0):
            raise ValueError("signal_power and noise_power must be positive")
        if self.num_snapshots < 1:
            raise ValueError("num_snapshots must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")

    @property
    def num_sources(self) -> int:
        return len(self.angles)

    @property
    def snr_db(self) -> float:
        return 10.0 * np.log10(self.signal_power / self.noise_power)


@dataclass(frozen=True)
class SnapshotMatrix:
    """Complex baseband observations of one group, rows x num_snapshots."""

    data: np.ndarray
    group: int

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.complex128)
        if d.ndim != 2 or d.size == 0:
            raise ValueError("snapshot data must be a non-empty 2-D matrix")
        d.flags.writeable = False
        object.__setattr__(self, "data", d)

    @property
    def num_snapshots(self) -> int:
        return self.data.shape[1]


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(stream)]))


def _complex_gaussian(rng, shape, power: float) -> np.ndarray:
    scale = np.sqrt(power / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _source_matrix(scene: SourceScene) -> np.ndarray:
    rng = _rng(scene.seed, 0)
    return _complex_gaussian(rng, (scene.num_sources, scene.num_snapshots),
                             scene.signal_power)


def combining_matrix(config: ArrayConfig, q: int) -> np.ndarray:
    """(K, N_q) analog combiner of group q: row k averages subarray k.

    Entries are e^{-j phi_{q,k,m}} / sqrt(M_q); phases default to zero.
    """
    config._check_group(q)
    k = config.subarrays_per_group
    m_q = config.antennas_per_subarray[q - 1]
    c = np.zeros((k, k * m_q), dtype=np.complex128)
    weights = np.exp(-1j * config.phases(q)) / np.sqrt(m_q)
    for ki in range(k):
        c[ki, ki * m_q:(ki + 1) * m_q] = weights[ki]
    return c


def generate_group_snapshots(config: ArrayConfig, scene: SourceScene, q: int,
                             fully_digital: bool = False,
                             global_position: bool = False) -> SnapshotMatrix:
    """Observations of group q: analog-combined (K rows) or, in the
    fully-digital diagnostic mode, per-antenna (N_q rows).

    ``global_position`` phases the manifold by the group's position in the
    full array so stacked groups form one coherent aperture; per-group
    second-order statistics are invariant to it.
    """
    config._check_group(q)
    if not fully_digital and scene.num_sources > config.subarrays_per_group:
        raise ModelOrderError(
            f"{scene.num_sources} sources exceed the {config.subarrays_per_group} "
            "RF-chain outputs per group; the signal subspace cannot be resolved")
    manifold = np.column_stack(
        [steering(config, q, theta, global_position).entries
         for theta in scene.angles])
    sources = _source_matrix(scene)
    noise = _complex_gaussian(_rng(scene.seed, q),
                              (config.group_sizes[q - 1], scene.num_snapshots),
                              scene.noise_power)
    x = manifold @ sources + noise
    if fully_digital:
        phase_shift = np.exp(-1j * config.phases(q)).reshape(-1, 1)
        return SnapshotMatrix(phase_shift * x, q)
    return SnapshotMatrix(combining_matrix(config, q) @ x, q)


def generate_all_groups(config: ArrayConfig, scene: SourceScene,
                        fully_digital: bool = False,
                        global_position: bool = False) -> list[SnapshotMatrix]:
    """All Q groups, sharing one source matrix with independent per-group noise."""
    return [generate_group_snapshots(config, scene, q, fully_digital,
                                     global_position)
            for q in range(1, config.num_groups + 1)]


def generate_full_array(config: ArrayConfig, scene: SourceScene) -> SnapshotMatrix:
    """The whole M-antenna aperture as one coherent observation (group 0).

    Stacks the groups' fully-digital outputs with their global position
    phases; the covariance of this matrix carries the full-array signal
    eigenstructure the learned counters consume.
    """
    parts = generate_all_groups(config, scene, fully_digital=True,
                                global_position=True)
    return SnapshotMatrix(np.vstack([p.data for p in parts]), 0)


def write_snapshots(path, snap: SnapshotMatrix) -> None:
    """Binary dump: 24-byte header (magic, u32 rows/cols/group, u32 reserved),
    then little-endian float64 (re, im) pairs in row-major order."""
    rows, cols = snap.data.shape
    interleaved = np.empty((rows, cols, 2), dtype="<f8")
    interleaved[..., 0] = snap.data.real
    interleaved[..., 1] = snap.data.imag
    with open(path, "wb") as fh:
        fh.write(_SNAP_MAGIC)
        fh.write(struct.pack("<IIII", rows, cols, snap.group, 0))
        fh.write(interleaved.tobytes())


def read_snapshots(path) -> SnapshotMatrix:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _SNAP_MAGIC:
            raise ValueError(f"not a snapshot file (magic {magic!r})")
        rows, cols, group, _ = struct.unpack("<IIII", fh.read(16))
        raw = np.frombuffer(fh.read(rows * cols * 16), dtype="<f8")
    pairs = raw.reshape(rows, cols, 2)
    return SnapshotMatrix(pairs[..., 0] + 1j * pairs[..., 1], group)
