"""Shared fixtures: reference configs, cached trained models, acceptance report."""

import math
import os

import numpy as np
import pytest

from h2ad import ArrayConfig, SourceScene
from h2ad.harness import number_sensing_defaults, train_models

BUILD_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "build")

_ACCEPTANCE_RESULTS = []


@pytest.fixture
def doa_array():
    """Direction-finding geometry: Q=3 groups, K=16 subarrays, coprime sizes."""
    return ArrayConfig(num_groups=3, subarrays_per_group=16,
                       antennas_per_subarray=(7, 13, 17))


@pytest.fixture
def sensing_array():
    """Number-sensing geometry: 97 antennas split 29/31/37."""
    return ArrayConfig(num_groups=3, subarrays_per_group=1,
                       antennas_per_subarray=(29, 31, 37))


@pytest.fixture
def doa_scene():
    return SourceScene(angles=(math.radians(11), math.radians(23)),
                       signal_power=1.0, noise_power=1.0,
                       num_snapshots=200, seed=7)


@pytest.fixture(scope="session")
def trained_model_dir():
    """Train the three counters once per recipe and cache them under build/."""
    cfg = number_sensing_defaults()
    tag = (f"models-s{cfg.seed}-n{cfg.samples_per_class}-a{cfg.a_max}"
           f"-r{cfg.train_snr_db[0]:g}_{cfg.train_snr_db[1]:g}"
           f"-c{cfg.cnn_epochs}x{cfg.cnn_lr:g}")
    model_dir = os.path.abspath(os.path.join(BUILD_DIR, tag))
    marker = os.path.join(model_dir, "train_report.csv")
    if not os.path.exists(marker):
        os.makedirs(model_dir, exist_ok=True)
        from dataclasses import replace
        train_models(replace(cfg, model_dir=model_dir, out_dir=model_dir))
    return model_dir


@pytest.fixture
def record_acceptance():
    def _record(criterion: str, passed: bool, detail: str = ""):
        _ACCEPTANCE_RESULTS.append((criterion, passed, detail))
    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        line = f"{status}  {criterion}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
