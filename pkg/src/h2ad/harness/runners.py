"""Experiment runners: Monte Carlo sweeps persisted as CSV.

Every trial derives its own seed from (master seed, sweep point, trial), so
trials are independent and the sweep is reproducible regardless of execution
order; rows are canonicalized by (snr, trial, estimator) before writing.
Estimator failures become rows with metric "failure" rather than aborts.
"""

from __future__ import annotations

import math
import os
import time

import numpy as np

from ..arrays import ArrayConfig
from ..crlb import crlb
from ..edc import edc_analysis
from ..esprit import build_candidate_set
from ..exceptions import ConfigurationError, InsufficientSupportError
from ..fusion import OmcDoaFuser, WgmdFuser, WlmdFuser, accuracy_and_rmse
from ..nn.dataset import (SweepSpec, dataset_generate, sample_angles,
                          save_dataset)
from ..nn.models import ConvSourceCounter, DenseSourceCounter
from ..nn.persist import fit_and_export, load_classifier
from ..simulate import SourceScene, generate_all_groups
from ..spectral import hermitian_eig, sample_covariance
from .config import ExperimentConfig
from .csvio import write_csv

__all__ = ["run_number_sensing_experiment", "run_doa_experiment",
           "run_complexity_benchmark", "run_crlb_sweep", "train_models",
           "MODEL_FILES"]

TRIAL_HEADER = ["experiment", "snr_db", "trial", "estimator", "metric",
                "value", "schema"]
SCHEMA_VERSION = 1

MODEL_FILES = {"dense": "dense.model", "cnn": "cnn.model", "fcnn": "fcnn.model"}


def _trial_seed(master: int, point: int, trial: int) -> int:
    ss = np.random.SeedSequence([master, point, trial])
    return int(ss.generate_state(1, np.uint64)[0] >> 1)


def _scene(cfg: ExperimentConfig, snr_db: float, seed: int,
           angles: tuple[float, ...]) -> SourceScene:
    return SourceScene(angles=angles,
                       signal_power=cfg.noise_power * 10.0 ** (snr_db / 10.0),
                       noise_power=cfg.noise_power,
                       num_snapshots=cfg.num_snapshots,
                       seed=seed)


def _trial_angles(cfg: ExperimentConfig, point: int, trial: int,
                  count: int) -> tuple[float, ...]:
    fixed = cfg.angles_rad()
    if fixed is not None:
        return fixed
    rng = np.random.default_rng(
        np.random.SeedSequence([cfg.seed, 97, point, trial]))
    return sample_angles(rng, count, cfg.angle_range_deg,
                         cfg.min_separation_deg)


def _required_models(cfg: ExperimentConfig) -> dict[str, str]:
    wanted = {}
    for tag in cfg.estimators:
        if tag in MODEL_FILES:
            path = os.path.join(cfg.model_dir, MODEL_FILES[tag])
            if not os.path.exists(path):
                raise ConfigurationError(
                    f"model file {path} for estimator {tag!r} is missing; "
                    f"train it first:  h2ad train --out {cfg.model_dir}")
            wanted[tag] = path
    return wanted


def run_number_sensing_experiment(cfg: ExperimentConfig) -> dict[str, str]:
    """Accuracy of the source-count estimators over the SNR sweep.

    Writes the per-trial long-format CSV, an accuracy summary, and one
    eigen-scatter dump per SNR point (first trial) for the scatter figure.
    """
    model_paths = _required_models(cfg)
    classifiers = {tag: load_classifier(path) for tag, path in model_paths.items()}

    rows, scatter_rows = [], []
    correct: dict[tuple[float, str], int] = {}
    for point, snr_db in enumerate(cfg.snr_points()):
        for trial in range(cfg.trials):
            angles = _trial_angles(cfg, point, trial, cfg.num_sources)
            scene = _scene(cfg, snr_db, _trial_seed(cfg.seed, point, trial),
                           angles)
            snaps = generate_all_groups(cfg.array, scene, fully_digital=True,
                                        global_position=True)
            spectra = [hermitian_eig(sample_covariance(s)) for s in snaps]
            full = hermitian_eig(sample_covariance(
                np.vstack([s.data for s in snaps]))).eigenvalues

            for tag in cfg.estimators:
                try:
                    if tag == "edc":
                        count, points, labeling, noise_id = edc_analysis(
                            spectra, cfg.edc_exponent, cfg.edc_eps,
                            cfg.edc_min_pts)
                        if trial == 0:
                            for pt, label in zip(points, labeling.labels):
                                scatter_rows.append((snr_db, pt.group,
                                                     pt.x, pt.y, int(label)))
                    else:
                        count = int(classifiers[tag].predict(full[None, :])[0])
                except Exception:
                    rows.append(("number_sensing", snr_db, trial, tag,
                                 "failure", 1.0, SCHEMA_VERSION))
                    continue
                good = int(count == scene.num_sources)
                rows.append(("number_sensing", snr_db, trial, tag,
                             "estimate", float(count), SCHEMA_VERSION))
                rows.append(("number_sensing", snr_db, trial, tag,
                             "correct", float(good), SCHEMA_VERSION))
                correct[(snr_db, tag)] = correct.get((snr_db, tag), 0) + good

    rows.sort(key=lambda r: (r[1], r[2], r[3], r[4]))
    out = cfg.out_dir
    paths = {
        "trials": write_csv(os.path.join(out, "number_sensing_trials.csv"),
                            TRIAL_HEADER, rows),
        "summary": write_csv(
            os.path.join(out, "number_sensing_summary.csv"),
            ["snr_db", "estimator", "accuracy", "trials"],
            sorted(((snr, tag, n / cfg.trials, cfg.trials)
                    for (snr, tag), n in correct.items()),
                   key=lambda r: (r[0], r[1]))),
        "scatter": write_csv(os.path.join(out, "eigen_scatter.csv"),
                             ["snr_db", "group", "x", "y", "label"],
                             scatter_rows),
    }
    return paths


def _make_fusers(cfg: ExperimentConfig) -> dict[str, object]:
    table = {
        "omc": OmcDoaFuser(cfg.omc_radius_deg, cfg.omc_decay,
                           cfg.omc_eviction_floor, cfg.omc_merge_deg),
        "wgmd": WgmdFuser(),
        "wlmd": WlmdFuser(),
    }
    return {tag: table[tag] for tag in cfg.fusers}


def run_doa_experiment(cfg: ExperimentConfig) -> dict[str, str]:
    """Direction estimation sweep with CRLB reference columns."""
    truth = cfg.angles_rad()
    if truth is None:
        raise ConfigurationError("the DOA experiment needs fixed scene angles")
    num_sources = len(truth)
    fusers = _make_fusers(cfg)

    rows = []
    estimates: dict[tuple[float, str], list[np.ndarray]] = {}
    crlb_deg: dict[float, np.ndarray] = {}
    for point, snr_db in enumerate(cfg.snr_points()):
        ref_scene = _scene(cfg, snr_db, 0, truth)
        bounds = crlb(cfg.array, ref_scene, cfg.num_snapshots)
        crlb_deg[snr_db] = np.sqrt(bounds.bounds_deg2())
        for trial in range(cfg.trials):
            scene = _scene(cfg, snr_db, _trial_seed(cfg.seed, point, trial),
                           truth)
            snaps = generate_all_groups(cfg.array, scene)
            candidates = build_candidate_set(cfg.array, snaps, num_sources)
            rows.append(("doa", snr_db, trial, "candidates", "count",
                         float(len(candidates)), SCHEMA_VERSION))
            for tag, fuser in fusers.items():
                try:
                    result = fuser.fuse(candidates.candidates, num_sources)
                except InsufficientSupportError:
                    rows.append(("doa", snr_db, trial, tag, "failure", 1.0,
                                 SCHEMA_VERSION))
                    estimates.setdefault((snr_db, tag), []).append(
                        np.empty(0))
                    continue
                est = np.array(result.angles)
                estimates.setdefault((snr_db, tag), []).append(est)
                for i, t in enumerate(truth, start=1):
                    err = float(np.degrees(np.abs(est - t)).min())
                    rows.append(("doa", snr_db, trial, tag,
                                 f"error_deg_{i}", err, SCHEMA_VERSION))
                    rows.append(("doa", snr_db, trial, tag, f"correct_{i}",
                                 float(err <= cfg.gate_deg), SCHEMA_VERSION))

    summary = []
    for (snr_db, tag), est_list in sorted(estimates.items()):
        stats = accuracy_and_rmse(est_list, truth, cfg.gate_deg)
        for i, angle in enumerate(truth):
            summary.append((snr_db, tag, math.degrees(angle),
                            float(stats["accuracy"][i]),
                            float(stats["rmse_deg"][i]),
                            float(crlb_deg[snr_db][i]),
                            stats["trials"]))

    rows.sort(key=lambda r: (r[1], r[2], r[3], r[4]))
    out = cfg.out_dir
    return {
        "trials": write_csv(os.path.join(out, "doa_trials.csv"),
                            TRIAL_HEADER, rows),
        "summary": write_csv(
            os.path.join(out, "doa_summary.csv"),
            ["snr_db", "estimator", "angle_deg", "accuracy", "rmse_deg",
             "crlb_deg", "trials"], summary),
    }


def run_complexity_benchmark(cfg: ExperimentConfig) -> dict[str, str]:
    """Operation counts and wall time of the fusers vs array size."""
    if not cfg.complexity_sets:
        raise ConfigurationError("empty complexity sweep")
    fusers = _make_fusers(cfg)
    rows = []
    for set_idx, subarrays in enumerate(cfg.complexity_sets):
        array = ArrayConfig(num_groups=len(subarrays),
                            subarrays_per_group=cfg.array.subarrays_per_group,
                            antennas_per_subarray=subarrays,
                            element_spacing=cfg.array.element_spacing,
                            wavelength=cfg.array.wavelength)
        antennas = array.total_antennas
        truth = cfg.angles_rad() or tuple(
            math.radians(a) for a in (11.0, 23.0))
        op_counts: dict[str, list[int]] = {tag: [] for tag in fusers}
        times: dict[str, list[float]] = {tag: [] for tag in fusers}
        for trial in range(cfg.complexity_trials):
            scene = _scene(cfg, 0.0, _trial_seed(cfg.seed, 1000 + set_idx,
                                                 trial), truth)
            snaps = generate_all_groups(array, scene)
            candidates = build_candidate_set(array, snaps, len(truth))
            for tag, fuser in fusers.items():
                start = time.perf_counter_ns()
                try:
                    fuser.fuse(candidates.candidates, len(truth))
                except InsufficientSupportError:
                    pass
                times[tag].append(time.perf_counter_ns() - start)
                op_counts[tag].append(fuser.op_count_)
        for tag in fusers:
            rows.append((antennas, tag,
                         float(np.median(times[tag])),
                         float(np.mean(op_counts[tag]))))
    rows.sort(key=lambda r: (r[0], r[1]))
    return {"complexity": write_csv(
        os.path.join(cfg.out_dir, "complexity.csv"),
        ["antennas", "method", "ns_per_trial", "op_count"], rows)}


def run_crlb_sweep(cfg: ExperimentConfig) -> dict[str, str]:
    """CRLB (degrees^2) per angle over the SNR sweep."""
    truth = cfg.angles_rad()
    if truth is None:
        raise ConfigurationError("the CRLB sweep needs fixed scene angles")
    rows = []
    for snr_db in cfg.snr_points():
        scene = _scene(cfg, snr_db, 0, truth)
        bounds = crlb(cfg.array, scene, cfg.num_snapshots)
        for angle, bound_deg2 in zip(truth, bounds.bounds_deg2()):
            rows.append((snr_db, math.degrees(angle), float(bound_deg2)))
    rows.sort(key=lambda r: (r[0], r[1]))
    return {"crlb": write_csv(os.path.join(cfg.out_dir, "crlb_sweep.csv"),
                              ["snr_db", "angle_deg", "crlb_deg2"], rows)}


def train_models(cfg: ExperimentConfig) -> dict[str, str]:
    """Generate the labeled dataset and train/export the three classifiers."""
    spec = SweepSpec(a_max=cfg.a_max, samples_per_class=cfg.samples_per_class,
                     snr_db_range=cfg.train_snr_db,
                     angle_range_deg=cfg.angle_range_deg,
                     min_separation_deg=cfg.min_separation_deg,
                     noise_power=cfg.noise_power,
                     num_snapshots=cfg.num_snapshots, seed=cfg.seed)
    dataset = dataset_generate(cfg.array, spec)
    os.makedirs(cfg.model_dir, exist_ok=True)
    dataset_path = os.path.join(cfg.model_dir, "dataset.csv")
    save_dataset(dataset_path, dataset)

    counters = {
        "dense": DenseSourceCounter(epochs=cfg.dense_epochs, seed=cfg.seed),
        "fcnn": DenseSourceCounter(epochs=cfg.dense_epochs, use_entropy=False,
                                   seed=cfg.seed),
        "cnn": ConvSourceCounter(epochs=cfg.cnn_epochs, lr=cfg.cnn_lr,
                                 batch_size=cfg.cnn_batch_size,
                                 decay_every=cfg.cnn_decay_every,
                                 seed=cfg.seed),
    }
    paths = {"dataset": dataset_path}
    report = []
    for tag, counter in counters.items():
        path = os.path.join(cfg.model_dir, MODEL_FILES[tag])
        _, test_acc = fit_and_export(counter, dataset, path)
        paths[tag] = path
        report.append((tag, test_acc))
    report.sort()
    paths["report"] = write_csv(os.path.join(cfg.model_dir, "train_report.csv"),
                                ["model", "test_accuracy"], report)
    return paths
