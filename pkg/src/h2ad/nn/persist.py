"""Deployable classifier files: trained counter -> model file -> predictor.

The input standardization learned at fit time is embedded as a frozen Affine
layer ahead of the trained network, so the model file alone reproduces the
counter's predictions.  The flavor of a loaded model is inferred from its
structure: any Conv1d layer means the log-eigenvalue CNN; otherwise the
leading Affine length tells whether the entropy feature is present (5) or
not (4).  Class labels are 1..C with C the output width.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..base import as_sample_matrix
from ..features import extract_features
from .layers import Affine, Conv1d
from .models import ConvSourceCounter, DenseSourceCounter
from .network import Network, load_network, save_network

__all__ = ["SpectrumClassifier", "export_counter", "load_classifier"]


@dataclass
class SpectrumClassifier:
    """Inference-only wrapper: raw eigenvalue rows in, source counts out."""

    net: Network
    kind: str  # dense5 | dense4 | cnn

    def _inputs(self, eigenvalue_rows: np.ndarray) -> np.ndarray:
        x = as_sample_matrix(eigenvalue_rows)
        if self.kind == "cnn":
            return np.log(np.maximum(x, 1e-300))[:, None, :]
        entropy = self.kind == "dense5"
        return np.array([extract_features(row).as_array(entropy) for row in x])

    def predict_proba(self, eigenvalue_rows) -> np.ndarray:
        return self.net.predict_proba(self._inputs(eigenvalue_rows))

    def predict(self, eigenvalue_rows) -> np.ndarray:
        return self.predict_proba(eigenvalue_rows).argmax(axis=1) + 1


def export_counter(path, counter) -> None:
    """Write a fitted counter as a self-contained model file."""
    counter._check_fitted()
    scaler = Affine(1.0 / counter.scale_, -counter.mean_ / counter.scale_)
    save_network(path, Network([scaler] + counter.net_.layers))


def _infer_kind(net: Network) -> str:
    if any(isinstance(layer, Conv1d) for layer in net.layers):
        return "cnn"
    first = net.layers[0]
    if isinstance(first, Affine) and first.scale.size == 4:
        return "dense4"
    return "dense5"


def load_classifier(path) -> SpectrumClassifier:
    net = load_network(path)
    return SpectrumClassifier(net, _infer_kind(net))


def fit_and_export(counter, dataset, path):
    """Train a counter on a dataset's train+val rows and export it.

    Returns (counter, held-out test accuracy).
    """
    x_train, y_train = dataset.subset("train")
    x_val, y_val = dataset.subset("val")
    x = np.vstack([x_train, x_val])
    y = np.concatenate([y_train, y_val])
    eig = np.exp(x)  # dataset rows store log-eigenvalues
    if isinstance(counter, (DenseSourceCounter, ConvSourceCounter)):
        counter.fit(eig, y)
    else:
        raise TypeError(f"unsupported counter {type(counter).__name__}")
    export_counter(path, counter)
    x_test, y_test = dataset.subset("test")
    acc = counter.score(np.exp(x_test), y_test) if len(y_test) else float("nan")
    return counter, acc
