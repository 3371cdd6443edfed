"""Heterogeneous hybrid analog-digital (H2AD) array geometry.

An H2AD receiver is a uniform linear array of M antennas partitioned into Q
groups; group q holds K subarrays of M_q antennas each (N_q = K * M_q), with K
identical across groups and the M_q chosen pairwise coprime so that phase
ambiguities of different groups never coincide.  This module produces the
per-group steering vectors, the K-element virtual-array steering vectors that
arise after analog combining (inter-element spacing M_q * d), and the analog
subarray gain factor.
"""

from __future__ import annotations

import hashlib
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError

__all__ = ["ArrayConfig", "SteeringVector", "steering", "virtual_steering",
           "subarray_gain", "config_digest"]


@dataclass(frozen=True, eq=False)
class ArrayConfig:
    """Geometry of an H2AD receiver.

    Angles are radians everywhere in this package; degrees appear only at the
    CLI boundary.  ``analog_phases`` holds one (K, M_q) array of phase-shifter
    settings per group; None means all-zero phases (identity combining).
    """

    num_groups: int
    subarrays_per_group: int
    antennas_per_subarray: tuple[int, ...]
    element_spacing: float = 0.5
    wavelength: float = 1.0
    analog_phases: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        q, k = self.num_groups, self.subarrays_per_group
        if q < 1 or k < 1:
            raise ConfigurationError("num_groups and subarrays_per_group must be >= 1")
        m = tuple(int(v) for v in self.antennas_per_subarray)
        if len(m) != q or any(v < 1 for v in m):
            raise ConfigurationError(
                f"antennas_per_subarray must list {q} positive integers, got {m}")
        object.__setattr__(self, "antennas_per_subarray", m)
        if self.element_spacing <= 0 or self.wavelength <= 0:
            raise ConfigurationError("element_spacing and wavelength must be positive")
        if self.element_spacing > self.wavelength / 2:
            warnings.warn("element_spacing exceeds half the wavelength; the base "
                          "array itself is spatially ambiguous", stacklevel=2)
        if self.analog_phases is not None:
            phases = []
            for qi, arr in enumerate(self.analog_phases):
                a = np.array(arr, dtype=np.float64)
                if a.shape != (k, m[qi]):
                    raise ConfigurationError(
                        f"analog_phases[{qi}] must have shape {(k, m[qi])}, got {a.shape}")
                a.flags.writeable = False
                phases.append(a)
            object.__setattr__(self, "analog_phases", tuple(phases))

    @property
    def group_sizes(self) -> tuple[int, ...]:
        """N_q = K * M_q for every group."""
        k = self.subarrays_per_group
        return tuple(k * m for m in self.antennas_per_subarray)

    @property
    def total_antennas(self) -> int:
        return sum(self.group_sizes)

    def group_offset(self, q: int) -> int:
        """Number of array elements preceding group q (global position prefix)."""
        self._check_group(q)
        return sum(self.group_sizes[: q - 1])

    def phases(self, q: int) -> np.ndarray:
        """(K, M_q) phase-shifter settings for group q, radians."""
        self._check_group(q)
        if self.analog_phases is None:
            return np.zeros((self.subarrays_per_group,
                             self.antennas_per_subarray[q - 1]))
        return self.analog_phases[q - 1]

    def is_pairwise_coprime(self) -> bool:
        m = self.antennas_per_subarray
        return all(math.gcd(m[i], m[j]) == 1
                   for i in range(len(m)) for j in range(i + 1, len(m)))

    def _check_group(self, q: int):
        if not 1 <= q <= self.num_groups:
            raise ConfigurationError(
                f"group index must be in 1..{self.num_groups}, got {q}")


@dataclass(frozen=True)
class SteeringVector:
    """Complex phase profile of a plane wave across one group's elements."""

    entries: np.ndarray
    angle: float
    group: int

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.complex128)
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)


def _check_angle(theta: float):
    if not abs(theta) < math.pi / 2:
        raise ValueError(f"angle must satisfy |theta| < pi/2 rad, got {theta}")


def _wavenumber_spacing(config: ArrayConfig) -> float:
    return 2.0 * math.pi * config.element_spacing / config.wavelength


def steering(config: ArrayConfig, q: int, theta: float,
             global_position: bool = False) -> SteeringVector:
    """Steering vector of group q: entry n = exp(j*(2pi/lambda)*(n-1)*d*sin(theta)).

    With ``global_position`` the vector is premultiplied by the phase of the
    group's first element in the full array, exp(j*(2pi/lambda)*d*sin(theta)*
    sum_{q'<q} N_q'); only the Fisher-information machinery needs absolute
    positions.
    """
    config._check_group(q)
    _check_angle(theta)
    n = config.group_sizes[q - 1]
    beta = _wavenumber_spacing(config) * math.sin(theta)
    idx = np.arange(n, dtype=np.float64)
    if global_position:
        idx = idx + config.group_offset(q)
    return SteeringVector(np.exp(1j * beta * idx), theta, q)


def virtual_steering(config: ArrayConfig, q: int, theta: float) -> SteeringVector:
    """Steering vector of group q's virtual array (K elements, spacing M_q*d)."""
    config._check_group(q)
    _check_angle(theta)
    m_q = config.antennas_per_subarray[q - 1]
    beta = _wavenumber_spacing(config) * m_q * math.sin(theta)
    idx = np.arange(config.subarrays_per_group, dtype=np.float64)
    return SteeringVector(np.exp(1j * beta * idx), theta, q)


def config_digest(config: ArrayConfig) -> str:
    """Short stable hash of the geometry, stamped into derived artifacts."""
    text = (f"Q={config.num_groups};K={config.subarrays_per_group};"
            f"M={config.antennas_per_subarray};d={config.element_spacing!r};"
            f"wl={config.wavelength!r}")
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def subarray_gain(config: ArrayConfig, q: int, theta: float) -> complex:
    """Analog gain of one M_q-antenna subarray steered to broadside.

    g_q(theta) = (1 - e^{j(2pi/lambda) M_q d sin(theta)}) /
                 (1 - e^{j(2pi/lambda) d sin(theta)})
    i.e. the unnormalized geometric sum of the subarray element phases; at the
    singular points (d*sin(theta)/lambda integer) all terms coincide and the
    limit M_q is returned.
    """
    config._check_group(q)
    _check_angle(theta)
    m_q = config.antennas_per_subarray[q - 1]
    x = _wavenumber_spacing(config) * math.sin(theta)
    denom = 1.0 - np.exp(1j * x)
    if abs(denom) < 1e-12:
        return complex(m_q)
    return complex((1.0 - np.exp(1j * m_q * x)) / denom)
