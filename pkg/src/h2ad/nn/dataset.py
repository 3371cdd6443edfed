"""Labeled dataset generation for the supervised counters.

Each sample is one simulated observation: A sources (A spanning 1..a_max)
at random angles with a minimum separation, SNR uniform over the sweep range,
observed through the fully-digital diagnostic chain; the stored feature row is
the descending log-eigenvalue sequence of the full M-antenna covariance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..arrays import ArrayConfig, config_digest
from ..exceptions import ParameterError
from ..simulate import SourceScene, generate_full_array
from ..spectral import hermitian_eig, sample_covariance

__all__ = ["SweepSpec", "LabeledDataset", "sample_angles",
           "full_array_log_eigenvalues", "dataset_generate", "save_dataset",
           "load_dataset", "to_onehot"]

_SPLIT_CYCLE = ("train",) * 8 + ("val", "test")  # per-class 80/10/10


@dataclass(frozen=True)
class SweepSpec:
    a_max: int = 3
    samples_per_class: int = 600
    snr_db_range: tuple[float, float] = (-20.0, 0.0)
    angle_range_deg: tuple[float, float] = (-60.0, 60.0)
    min_separation_deg: float = 4.0
    noise_power: float = 1.0
    num_snapshots: int = 200
    seed: int = 0


@dataclass
class LabeledDataset:
    features: np.ndarray          # (n, M) log-eigenvalues, descending
    labels: np.ndarray            # (n,) source counts
    snr_db: np.ndarray            # (n,)
    split: np.ndarray             # (n,) in {train, val, test}
    meta: dict = field(default_factory=dict)

    def subset(self, split: str):
        mask = self.split == split
        return self.features[mask], self.labels[mask]

    def class_counts(self, split: str) -> dict[int, int]:
        _, y = self.subset(split)
        vals, counts = np.unique(y, return_counts=True)
        return dict(zip(vals.tolist(), counts.tolist()))

    def __len__(self):
        return self.labels.size


def sample_angles(rng: np.random.Generator, count: int,
                  range_deg=(-60.0, 60.0), min_separation_deg: float = 4.0,
                  max_tries: int = 1000) -> tuple[float, ...]:
    """Random angles (radians) with pairwise separation, by rejection."""
    lo, hi = range_deg
    for _ in range(max_tries):
        draw = np.sort(rng.uniform(lo, hi, size=count))
        if count == 1 or np.min(np.diff(draw)) >= min_separation_deg:
            return tuple(np.deg2rad(draw))
    raise ParameterError(
        f"could not place {count} angles with {min_separation_deg} deg "
        f"separation in {range_deg} after {max_tries} tries")


def full_array_log_eigenvalues(config: ArrayConfig,
                               scene: SourceScene) -> np.ndarray:
    """Descending log-eigenvalues of the full-array covariance (length M)."""
    snap = generate_full_array(config, scene)
    vals = hermitian_eig(sample_covariance(snap)).eigenvalues
    return np.log(np.maximum(vals, 1e-300))


def dataset_generate(config: ArrayConfig, spec: SweepSpec) -> LabeledDataset:
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 11]))
    rows, labels, snrs, splits = [], [], [], []
    for a in range(1, spec.a_max + 1):
        for i in range(spec.samples_per_class):
            angles = sample_angles(rng, a, spec.angle_range_deg,
                                   spec.min_separation_deg)
            snr = rng.uniform(*spec.snr_db_range)
            scene = SourceScene(
                angles=angles,
                signal_power=spec.noise_power * 10.0 ** (snr / 10.0),
                noise_power=spec.noise_power,
                num_snapshots=spec.num_snapshots,
                seed=int(rng.integers(0, 2 ** 62)),
            )
            rows.append(full_array_log_eigenvalues(config, scene))
            labels.append(a)
            snrs.append(snr)
            splits.append(_SPLIT_CYCLE[i % len(_SPLIT_CYCLE)])
    return LabeledDataset(
        features=np.array(rows),
        labels=np.array(labels, dtype=int),
        snr_db=np.array(snrs),
        split=np.array(splits),
        meta={"seed": spec.seed, "a_max": spec.a_max,
              "samples_per_class": spec.samples_per_class,
              "snr_db_range": spec.snr_db_range,
              "angle_range_deg": spec.angle_range_deg,
              "min_separation_deg": spec.min_separation_deg,
              "num_snapshots": spec.num_snapshots,
              "config_hash": config_digest(config)},
    )


def to_onehot(labels: np.ndarray, classes: np.ndarray) -> np.ndarray:
    out = np.zeros((labels.size, classes.size))
    out[np.arange(labels.size), np.searchsorted(classes, labels)] = 1.0
    return out


def save_dataset(path, ds: LabeledDataset) -> None:
    """CSV of feat_0..feat_k,label plus a sidecar .meta.txt."""
    path = str(path)
    k = ds.features.shape[1]
    header = ",".join(f"feat_{i}" for i in range(k)) + ",label"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for row, label in zip(ds.features, ds.labels):
            fh.write(",".join(f"{v:.17g}" for v in row) + f",{label}\n")
    with open(path + ".meta.txt", "w", encoding="utf-8") as fh:
        for key, value in sorted(ds.meta.items()):
            fh.write(f"{key} = {value}\n")
        fh.write("split_policy = per-class row index mod 10 -> 8 train / 1 val / 1 test\n")


def load_dataset(path) -> LabeledDataset:
    path = str(path)
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if header[-1] != "label" or not header[0].startswith("feat_"):
            raise ValueError("unrecognized dataset header")
        feats, labels = [], []
        for line in fh:
            parts = line.strip().split(",")
            feats.append([float(v) for v in parts[:-1]])
            labels.append(int(parts[-1]))
    features = np.array(feats)
    labels_arr = np.array(labels, dtype=int)
    # splits are re-derived from the stored per-class generation order
    splits = np.empty(labels_arr.size, dtype=object)
    for cls in np.unique(labels_arr):
        idx = np.nonzero(labels_arr == cls)[0]
        for j, row in enumerate(idx):
            splits[row] = _SPLIT_CYCLE[j % len(_SPLIT_CYCLE)]
    meta = {}
    try:
        with open(path + ".meta.txt", "r", encoding="utf-8") as fh:
            for line in fh:
                if "=" in line:
                    key, value = line.split("=", 1)
                    meta[key.strip()] = value.strip()
    except FileNotFoundError:
        pass
    return LabeledDataset(features, labels_arr, np.full(labels_arr.size, np.nan),
                          splits.astype(str), meta)
