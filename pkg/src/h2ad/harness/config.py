"""Experiment configuration: defaults, profiles, and the key=value file loader.

The config file is plain text with [section] headers and key = value lines
(# comments allowed).  Unknown sections or keys are configuration errors so
typos fail fast.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace

from ..arrays import ArrayConfig
from ..exceptions import ConfigurationError

__all__ = ["ExperimentConfig", "load_config_file", "apply_config_file",
           "number_sensing_defaults", "doa_defaults", "complexity_defaults",
           "apply_profile", "PROFILES"]

PROFILES = ("smoke", "paper")

ESTIMATOR_TAGS = ("edc", "dense", "cnn", "fcnn")
FUSER_TAGS = ("omc", "wgmd", "wlmd")


@dataclass
class ExperimentConfig:
    array: ArrayConfig
    # scene template
    angles_deg: tuple[float, ...] | None  # None -> random angles per trial
    num_sources: int = 3
    num_snapshots: int = 200
    noise_power: float = 1.0
    # SNR sweep
    snr_start_db: float = -20.0
    snr_stop_db: float = 0.0
    snr_step_db: float = 2.0
    trials: int = 500
    seed: int = 12345
    out_dir: str = "results"
    # estimator selection
    estimators: tuple[str, ...] = ESTIMATOR_TAGS
    fusers: tuple[str, ...] = FUSER_TAGS
    # clustering knobs
    edc_exponent: float = 2.0
    edc_eps: float = 1.4
    edc_min_pts: int | None = None
    omc_radius_deg: float = 0.5
    omc_decay: float = 0.995
    omc_eviction_floor: float = 0.05
    omc_merge_deg: float = 0.3
    gate_deg: float = 1.0
    # random-angle policy (number sensing, dataset generation)
    angle_range_deg: tuple[float, float] = (-60.0, 60.0)
    min_separation_deg: float = 4.0
    # training
    model_dir: str = "results"
    a_max: int = 3
    samples_per_class: int = 3300
    train_snr_db: tuple[float, float] = (-24.0, 2.0)
    dense_epochs: int = 60
    cnn_epochs: int = 45
    cnn_lr: float = 0.04
    cnn_batch_size: int = 32
    cnn_decay_every: int = 15
    # complexity benchmark
    complexity_sets: tuple[tuple[int, ...], ...] = (
        (7, 13, 17), (11, 19, 23), (17, 29, 31), (23, 37, 41), (29, 43, 53))
    complexity_trials: int = 5

    def __post_init__(self):
        if self.snr_step_db <= 0:
            raise ConfigurationError("snr_step_db must be positive")
        if self.trials < 1:
            raise ConfigurationError("trials must be >= 1")
        if not self.estimators and not self.fusers:
            raise ConfigurationError("at least one estimator must be enabled")
        for tag in self.estimators:
            if tag not in ESTIMATOR_TAGS:
                raise ConfigurationError(f"unknown estimator tag {tag!r}")
        for tag in self.fusers:
            if tag not in FUSER_TAGS:
                raise ConfigurationError(f"unknown fuser tag {tag!r}")

    def snr_points(self) -> list[float]:
        points = []
        snr = self.snr_start_db
        while snr <= self.snr_stop_db + 1e-9:
            points.append(round(snr, 9))
            snr += self.snr_step_db
        if not points:
            raise ConfigurationError("empty SNR sweep")
        return points

    def angles_rad(self) -> tuple[float, ...] | None:
        if self.angles_deg is None:
            return None
        return tuple(math.radians(a) for a in self.angles_deg)


def number_sensing_defaults() -> ExperimentConfig:
    array = ArrayConfig(num_groups=3, subarrays_per_group=1,
                        antennas_per_subarray=(29, 31, 37))
    return ExperimentConfig(array=array, angles_deg=None, num_sources=3,
                            snr_start_db=-20.0, snr_stop_db=0.0,
                            snr_step_db=2.0, trials=500)


def doa_defaults() -> ExperimentConfig:
    array = ArrayConfig(num_groups=3, subarrays_per_group=16,
                        antennas_per_subarray=(7, 13, 17))
    return ExperimentConfig(array=array, angles_deg=(11.0, 23.0),
                            num_sources=2, snr_start_db=-20.0,
                            snr_stop_db=10.0, snr_step_db=5.0, trials=200)


def complexity_defaults() -> ExperimentConfig:
    cfg = doa_defaults()
    return replace(cfg, trials=cfg.complexity_trials)


def apply_profile(cfg: ExperimentConfig, profile: str | None) -> ExperimentConfig:
    if profile is None:
        return cfg
    if profile == "smoke":
        return replace(cfg, trials=8, snr_start_db=-10.0, snr_stop_db=0.0,
                       snr_step_db=10.0, samples_per_class=40,
                       dense_epochs=8, cnn_epochs=4,
                       complexity_sets=cfg.complexity_sets[:2],
                       complexity_trials=2)
    if profile == "paper":
        return replace(cfg, trials=5000)
    raise ConfigurationError(f"unknown profile {profile!r}; pick from {PROFILES}")


# -- file loading -----------------------------------------------------------

def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v.strip()) for v in text.split(",") if v.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v.strip()) for v in text.split(",") if v.strip())


def _strs(text: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def load_config_file(path) -> dict[str, dict[str, str]]:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config file {path}: {exc}") from exc
    return {section: dict(parser[section]) for section in parser.sections()}


def apply_config_file(cfg: ExperimentConfig, path) -> ExperimentConfig:
    """Overlay file values onto an existing config."""
    sections = load_config_file(path)
    array_kwargs = {}
    updates: dict[str, object] = {}

    handlers = {
        ("array", "num_groups"): lambda v: array_kwargs.update(num_groups=int(v)),
        ("array", "subarrays_per_group"):
            lambda v: array_kwargs.update(subarrays_per_group=int(v)),
        ("array", "antennas_per_subarray"):
            lambda v: array_kwargs.update(antennas_per_subarray=_ints(v)),
        ("array", "element_spacing"):
            lambda v: array_kwargs.update(element_spacing=float(v)),
        ("array", "wavelength"):
            lambda v: array_kwargs.update(wavelength=float(v)),
        ("scene", "angles_deg"):
            lambda v: updates.update(angles_deg=_floats(v) or None),
        ("scene", "num_sources"): lambda v: updates.update(num_sources=int(v)),
        ("scene", "num_snapshots"): lambda v: updates.update(num_snapshots=int(v)),
        ("scene", "noise_power"): lambda v: updates.update(noise_power=float(v)),
        ("sweep", "snr_start_db"): lambda v: updates.update(snr_start_db=float(v)),
        ("sweep", "snr_stop_db"): lambda v: updates.update(snr_stop_db=float(v)),
        ("sweep", "snr_step_db"): lambda v: updates.update(snr_step_db=float(v)),
        ("sweep", "trials"): lambda v: updates.update(trials=int(v)),
        ("sweep", "seed"): lambda v: updates.update(seed=int(v)),
        ("estimators", "enabled"): lambda v: updates.update(estimators=_strs(v)),
        ("estimators", "fusers"): lambda v: updates.update(fusers=_strs(v)),
        ("edc", "epsilon_exponent"): lambda v: updates.update(edc_exponent=float(v)),
        ("edc", "eps"): lambda v: updates.update(edc_eps=float(v)),
        ("edc", "min_pts"): lambda v: updates.update(edc_min_pts=int(v)),
        ("omc", "radius_deg"): lambda v: updates.update(omc_radius_deg=float(v)),
        ("omc", "decay"): lambda v: updates.update(omc_decay=float(v)),
        ("omc", "eviction_floor"):
            lambda v: updates.update(omc_eviction_floor=float(v)),
        ("omc", "merge_deg"): lambda v: updates.update(omc_merge_deg=float(v)),
        ("doa", "gate_deg"): lambda v: updates.update(gate_deg=float(v)),
        ("angles", "range_deg"): lambda v: updates.update(
            angle_range_deg=tuple(_floats(v))),
        ("angles", "min_separation_deg"):
            lambda v: updates.update(min_separation_deg=float(v)),
        ("models", "dir"): lambda v: updates.update(model_dir=v),
        ("train", "a_max"): lambda v: updates.update(a_max=int(v)),
        ("train", "samples_per_class"):
            lambda v: updates.update(samples_per_class=int(v)),
        ("train", "snr_db"): lambda v: updates.update(
            train_snr_db=tuple(_floats(v))),
        ("train", "dense_epochs"): lambda v: updates.update(dense_epochs=int(v)),
        ("train", "cnn_epochs"): lambda v: updates.update(cnn_epochs=int(v)),
        ("train", "cnn_lr"): lambda v: updates.update(cnn_lr=float(v)),
        ("train", "cnn_batch_size"): lambda v: updates.update(cnn_batch_size=int(v)),
        ("train", "cnn_decay_every"): lambda v: updates.update(cnn_decay_every=int(v)),
        ("complexity", "subarray_sets"): lambda v: updates.update(
            complexity_sets=tuple(_ints(part) for part in v.split(";") if part.strip())),
        ("complexity", "trials"): lambda v: updates.update(complexity_trials=int(v)),
        ("output", "dir"): lambda v: updates.update(out_dir=v),
    }

    for section, pairs in sections.items():
        for key, value in pairs.items():
            handler = handlers.get((section, key))
            if handler is None:
                raise ConfigurationError(
                    f"unknown config key [{section}] {key}")
            try:
                handler(value)
            except ValueError as exc:
                raise ConfigurationError(
                    f"bad value for [{section}] {key}: {value!r} ({exc})") from exc

    if array_kwargs:
        base = {
            "num_groups": cfg.array.num_groups,
            "subarrays_per_group": cfg.array.subarrays_per_group,
            "antennas_per_subarray": cfg.array.antennas_per_subarray,
            "element_spacing": cfg.array.element_spacing,
            "wavelength": cfg.array.wavelength,
        }
        base.update(array_kwargs)
        updates["array"] = ArrayConfig(**base)
    return replace(cfg, **updates)
