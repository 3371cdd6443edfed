"""CLI experiment harness: configs, sweep runners, CSV persistence."""

from .config import (ExperimentConfig, apply_config_file, apply_profile,
                     complexity_defaults, doa_defaults, load_config_file,
                     number_sensing_defaults)
from .runners import (MODEL_FILES, run_complexity_benchmark, run_crlb_sweep,
                      run_doa_experiment, run_number_sensing_experiment,
                      train_models)

__all__ = [
    "ExperimentConfig", "apply_config_file", "apply_profile",
    "complexity_defaults", "doa_defaults", "load_config_file",
    "number_sensing_defaults", "MODEL_FILES", "run_complexity_benchmark",
    "run_crlb_sweep", "run_doa_experiment", "run_number_sensing_experiment",
    "train_models",
]
