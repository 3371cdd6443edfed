"""Render harness CSVs into the five standard figures (PNG and SVG).

Rendering is read-only and deterministic: a fixed style, a fixed SVG hash
salt, and no timestamps, so byte-identical CSVs give identical images.
All statistics come precomputed from the harness; this module only draws.
"""

from __future__ import annotations

import csv
import math
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .figspec import (ColumnMissingError, EmptyDataError, FigureSpec,
                      REQUIRED_COLUMNS)

__all__ = ["render", "render_all", "read_table"]

matplotlib.rcParams["svg.hashsalt"] = "h2ad-plotviz"

_STYLE = {
    "edc": dict(color="#1f77b4", marker="o"),
    "dense": dict(color="#2ca02c", marker="s"),
    "cnn": dict(color="#d62728", marker="^"),
    "fcnn": dict(color="#7f7f7f", marker="v"),
    "omc": dict(color="#d62728", marker="o"),
    "wgmd": dict(color="#1f77b4", marker="s"),
    "wlmd": dict(color="#2ca02c", marker="^"),
}
_NO_DATE = {"Date": None}


def read_table(path, required: list[str]) -> dict[str, list[str]]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            columns = reader.fieldnames or []
            for name in required:
                if name not in columns:
                    raise ColumnMissingError(
                        f"column {name!r} missing from {path} "
                        f"(found {columns})")
            rows = list(reader)
    except OSError as exc:
        raise FileNotFoundError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise EmptyDataError(f"{path} holds no data rows")
    return {name: [r[name] for r in rows] for name in columns}


def _style(tag):
    return _STYLE.get(tag, dict(marker="."))


def _save(fig, out_dir, stem) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for ext in ("png", "svg"):
        path = os.path.join(out_dir, f"{stem}.{ext}")
        fig.savefig(path, dpi=120, metadata=_NO_DATE)
        written.append(path)
    plt.close(fig)
    return written


def _fig6(table):
    snrs = sorted({float(v) for v in table["snr_db"]})
    fig, axes = plt.subplots(1, len(snrs), figsize=(4 * len(snrs), 3.4),
                             squeeze=False)
    for ax, snr in zip(axes[0], snrs):
        xs, ys, labs = [], [], []
        for x, y, lab, s in zip(table["x"], table["y"], table["label"],
                                table["snr_db"]):
            if float(s) == snr:
                xs.append(float(x))
                ys.append(float(y))
                labs.append(int(lab))
        noise_mask = [l >= 0 for l in labs]
        ax.scatter([x for x, m in zip(xs, noise_mask) if m],
                   [y for y, m in zip(ys, noise_mask) if m],
                   s=14, c="#1f77b4", label="dense cluster")
        ax.scatter([x for x, m in zip(xs, noise_mask) if not m],
                   [y for y, m in zip(ys, noise_mask) if not m],
                   s=26, c="#d62728", marker="x", label="signal points")
        ax.set_title(f"SNR = {snr:g} dB")
        ax.set_xlabel("standardized eigenvalue")
        ax.set_ylabel("lifted coordinate")
        ax.legend(loc="upper left", fontsize=8)
    fig.suptitle("Lifted eigenvalue distribution")
    fig.tight_layout()
    return fig


def _fig7(table):
    fig, ax = plt.subplots(figsize=(6, 4))
    tags = sorted(set(table["estimator"]))
    for tag in tags:
        pts = sorted((float(s), float(a)) for s, e, a in
                     zip(table["snr_db"], table["estimator"],
                         table["accuracy"]) if e == tag)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=tag,
                **_style(tag))
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("source-count accuracy")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig


def _doa_panels(table, value_col, ylabel, logy, overlay_crlb):
    angles = sorted({float(a) for a in table["angle_deg"]})
    fig, axes = plt.subplots(1, len(angles), figsize=(5.2 * len(angles), 4),
                             squeeze=False)
    tags = sorted(set(table["estimator"]))
    for ax, angle in zip(axes[0], angles):
        rows = [i for i, a in enumerate(table["angle_deg"])
                if float(a) == angle]
        for tag in tags:
            pts = sorted(
                (float(table["snr_db"][i]), float(table[value_col][i]))
                for i in rows if table["estimator"][i] == tag)
            pts = [(s, v) for s, v in pts if not math.isnan(v)]
            if pts:
                ax.plot([p[0] for p in pts], [p[1] for p in pts], label=tag,
                        **_style(tag))
        if overlay_crlb:
            bound = sorted({(float(table["snr_db"][i]),
                             float(table["crlb_deg"][i])) for i in rows})
            ax.plot([p[0] for p in bound], [p[1] for p in bound], "k--",
                    label="sqrt(CRLB)")
        if logy:
            ax.set_yscale("log")
        ax.set_title(f"{ylabel}, angle {angle:g} deg")
        ax.set_xlabel("SNR (dB)")
        ax.set_ylabel(ylabel)
        ax.grid(alpha=0.3, which="both")
        ax.legend()
    fig.tight_layout()
    return fig


def _fig10(table):
    fig, ax = plt.subplots(figsize=(6, 4))
    methods = sorted(set(table["method"]))
    for tag in methods:
        pts = sorted((float(a), float(o)) for a, m, o in
                     zip(table["antennas"], table["method"],
                         table["op_count"]) if m == tag)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=tag,
                **_style(tag))
    ax.set_xlabel("total antennas")
    ax.set_ylabel("distance evaluations per trial")
    ax.set_yscale("log")
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    fig.tight_layout()
    return fig


def render(spec: FigureSpec, out_dir) -> list[str]:
    """Draw one figure; returns the written image paths (PNG then SVG)."""
    required = REQUIRED_COLUMNS[spec.figure_id]
    tables = {role: read_table(path, cols)
              for role, (path, cols) in
              ((r, (spec.inputs[r], required[r])) for r in required)}
    if spec.figure_id == "fig6":
        fig = _fig6(tables["scatter"])
    elif spec.figure_id == "fig7":
        fig = _fig7(tables["summary"])
    elif spec.figure_id == "fig8":
        fig = _doa_panels(tables["summary"], "rmse_deg", "RMSE (deg)",
                          logy=True, overlay_crlb=True)
    elif spec.figure_id == "fig9":
        fig = _doa_panels(tables["summary"], "accuracy", "accuracy",
                          logy=False, overlay_crlb=False)
    else:
        fig = _fig10(tables["complexity"])
    return _save(fig, out_dir, spec.output)


def render_all(specs, out_dir) -> dict[str, list[str]]:
    return {spec.figure_id: render(spec, out_dir) for spec in specs}
