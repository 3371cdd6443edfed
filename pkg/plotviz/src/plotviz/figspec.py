"""Figure specifications: which CSVs feed which figure, and where output goes."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

__all__ = ["FigureSpec", "ColumnMissingError", "EmptyDataError",
           "load_spec_file", "standard_figures", "REQUIRED_COLUMNS"]

FIGURE_IDS = ("fig6", "fig7", "fig8", "fig9", "fig10")

# per figure: input role -> required columns
REQUIRED_COLUMNS = {
    "fig6": {"scatter": ["snr_db", "group", "x", "y", "label"]},
    "fig7": {"summary": ["snr_db", "estimator", "accuracy"]},
    "fig8": {"summary": ["snr_db", "estimator", "angle_deg", "rmse_deg",
                         "crlb_deg"]},
    "fig9": {"summary": ["snr_db", "estimator", "angle_deg", "accuracy"]},
    "fig10": {"complexity": ["antennas", "method", "ns_per_trial",
                             "op_count"]},
}


class ColumnMissingError(ValueError):
    """A required column is absent from an input CSV."""


class EmptyDataError(ValueError):
    """An input CSV has a header but no rows to plot."""


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    inputs: dict[str, str]
    output: str
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure_id!r}; "
                             f"expected one of {FIGURE_IDS}")
        wanted = set(REQUIRED_COLUMNS[self.figure_id])
        if set(self.inputs) != wanted:
            raise ValueError(f"{self.figure_id} needs inputs {sorted(wanted)}, "
                             f"got {sorted(self.inputs)}")


def load_spec_file(path) -> list[FigureSpec]:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    base = os.path.dirname(os.path.abspath(path))
    specs = []
    for entry in raw["figures"]:
        inputs = {role: p if os.path.isabs(p) else os.path.join(base, p)
                  for role, p in entry["inputs"].items()}
        specs.append(FigureSpec(entry["id"], inputs, entry["output"],
                                entry.get("options", {})))
    return specs


def standard_figures(csv_dir) -> list[FigureSpec]:
    """The five standard figures wired to the harness output layout."""
    csv_dir = os.path.abspath(csv_dir)
    path = lambda name: os.path.join(csv_dir, name)
    return [
        FigureSpec("fig6", {"scatter": path("eigen_scatter.csv")},
                   "fig6_eigen_scatter"),
        FigureSpec("fig7", {"summary": path("number_sensing_summary.csv")},
                   "fig7_sensing_accuracy"),
        FigureSpec("fig8", {"summary": path("doa_summary.csv")},
                   "fig8_doa_rmse"),
        FigureSpec("fig9", {"summary": path("doa_summary.csv")},
                   "fig9_doa_accuracy"),
        FigureSpec("fig10", {"complexity": path("complexity.csv")},
                   "fig10_complexity"),
    ]
