"""Network architectures, FLOP model, and estimator-style source counters.

Two supervised counters classify the number of sources from the pooled
(descending-sorted, all groups concatenated) covariance eigenvalues:

* ``DenseSourceCounter`` -- three 64-wide fully connected layers with ReLU and
  dropout on five log-statistics of the spectrum (``use_entropy=False`` drops
  the spectral-entropy feature, giving the 4-feature baseline).
* ``ConvSourceCounter`` -- a 1-D CNN on the full log-eigenvalue sequence:
  conv(3)x64 -> batch-norm -> ReLU -> max-pool(2) -> conv(3)x128 -> ReLU ->
  global average pooling -> dense softmax head.
"""

from __future__ import annotations

import warnings

import numpy as np

from ..base import ParamsMixin, as_sample_matrix, require_finite
from ..features import extract_features
from .layers import (BatchNorm1d, Conv1d, Dense, Dropout, GlobalAvgPool,
                     MaxPool1d, ReLU, softmax)
from .network import Network, TrainConfig, train_network

__all__ = ["build_dense_net", "build_cnn_net", "dense_forward", "cnn_forward",
           "dense_flops", "cnn_flops", "DenseSourceCounter", "ConvSourceCounter"]


def build_dense_net(in_dim: int, classes: int, hidden: int = 64,
                    dropout_rate: float = 0.2, seed: int = 0) -> Network:
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    layers = []
    dims = [in_dim, hidden, hidden, hidden]
    for a, b in zip(dims[:-1], dims[1:]):
        layers += [Dense(a, b, rng), ReLU(), Dropout(dropout_rate)]
    layers.append(Dense(hidden, classes, rng))
    return Network(layers)


def build_cnn_net(input_len: int, classes: int, channels: tuple[int, int] = (64, 128),
                  kernel: int = 3, seed: int = 0) -> Network:
    rng = np.random.default_rng(np.random.SeedSequence([seed, 2]))
    c1, c2 = channels
    return Network([
        Conv1d(1, c1, kernel, rng),
        BatchNorm1d(c1),
        ReLU(),
        MaxPool1d(2),
        Conv1d(c1, c2, kernel, rng),
        ReLU(),
        GlobalAvgPool(),
        Dense(c2, classes, rng),
    ])


def dense_forward(net: Network, x) -> np.ndarray:
    """Class probabilities for feature rows (batch, features)."""
    return net.predict_proba(as_sample_matrix(x))


def cnn_forward(net: Network, x) -> np.ndarray:
    """Class probabilities for log-eigenvalue rows (batch, sequence)."""
    x = as_sample_matrix(x)
    return net.predict_proba(x[:, None, :])


def dense_flops(input_dim: int, hidden: int, classes: int) -> int:
    """Forward-pass FLOPs of the three-hidden-layer dense classifier."""
    if classes < 1:
        warnings.warn(f"non-positive class count {classes}; formula still "
                      "evaluates but the configuration is invalid", stacklevel=2)
    return 2 * (input_dim * hidden + 2 * hidden * hidden + hidden * classes)


def cnn_flops(input_len: int, classes: int) -> int:
    """Forward-pass FLOPs of the two-block 1-D CNN."""
    if classes < 1:
        warnings.warn(f"non-positive class count {classes}; formula still "
                      "evaluates but the configuration is invalid", stacklevel=2)
    return 24960 * input_len + 256 * classes


class _CounterBase(ParamsMixin):
    """Shared fit/predict plumbing; subclasses define the input transform."""

    def _split(self, x, y):
        n = x.shape[0]
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, 3]))
        order = rng.permutation(n)
        n_val = max(int(round(self.val_fraction * n)), 1) if n > 1 else 0
        val, train = order[:n_val], order[n_val:]
        return x[train], y[train], x[val], y[val]

    def _train_cfg(self) -> TrainConfig:
        return TrainConfig(lr=self.lr, momentum=self.momentum,
                           epochs=self.epochs, batch_size=self.batch_size,
                           lr_decay=self.lr_decay, decay_every=self.decay_every,
                           seed=self.seed)

    def fit(self, X, y):
        x = self._transform_fit(as_sample_matrix(X))
        y = np.asarray(y, dtype=int)
        self.classes_ = np.unique(y)
        idx = np.searchsorted(self.classes_, y)
        xt, yt, xv, yv = self._split(x, idx)
        self.net_ = self._build(x, self.classes_.size)
        self.history_ = train_network(self.net_, self._shape(xt), yt,
                                      self._shape(xv), yv, self._train_cfg())
        return self

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted()
        x = self._transform(as_sample_matrix(X))
        return self.net_.predict_proba(self._shape(x))

    def predict(self, X) -> np.ndarray:
        probs = self.predict_proba(X)
        return self.classes_[probs.argmax(axis=1)]

    def score(self, X, y) -> float:
        return float((self.predict(X) == np.asarray(y)).mean())

    def _check_fitted(self):
        if getattr(self, "net_", None) is None:
            raise RuntimeError(f"{type(self).__name__} is not fitted")

    def _shape(self, x):
        return x


class DenseSourceCounter(_CounterBase):
    """Dense classifier on the five spectrum statistics (or four without entropy)."""

    def __init__(self, hidden: int = 64, dropout: float = 0.2,
                 use_entropy: bool = True, lr: float = 1e-2,
                 momentum: float = 0.9, epochs: int = 60, batch_size: int = 64,
                 lr_decay: float = 0.5, decay_every: int = 20,
                 val_fraction: float = 0.1, seed: int = 0):
        self.hidden = hidden
        self.dropout = dropout
        self.use_entropy = use_entropy
        self.lr = lr
        self.momentum = momentum
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr_decay = lr_decay
        self.decay_every = decay_every
        self.val_fraction = val_fraction
        self.seed = seed
        self.net_ = None

    def _features(self, eigenvalue_rows: np.ndarray) -> np.ndarray:
        return np.array([extract_features(row).as_array(self.use_entropy)
                         for row in eigenvalue_rows])

    def _transform_fit(self, x):
        f = self._features(x)
        self.mean_ = f.mean(axis=0)
        self.scale_ = np.maximum(f.std(axis=0), 1e-12)
        return (f - self.mean_) / self.scale_

    def _transform(self, x):
        f = self._features(x)
        return (f - self.mean_) / self.scale_

    def _build(self, x, classes):
        return build_dense_net(x.shape[1], classes, self.hidden, self.dropout,
                               self.seed)


class ConvSourceCounter(_CounterBase):
    """1-D CNN classifier on the standardized log-eigenvalue sequence."""

    def __init__(self, channels: tuple[int, int] = (64, 128), kernel: int = 3,
                 lr: float = 1e-2, momentum: float = 0.9, epochs: int = 60,
                 batch_size: int = 64, lr_decay: float = 0.5,
                 decay_every: int = 20, val_fraction: float = 0.1,
                 seed: int = 0):
        self.channels = channels
        self.kernel = kernel
        self.lr = lr
        self.momentum = momentum
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr_decay = lr_decay
        self.decay_every = decay_every
        self.val_fraction = val_fraction
        self.seed = seed
        self.net_ = None

    def _log(self, x):
        require_finite(x, "eigenvalues")
        return np.log(np.maximum(x, 1e-300))

    def _transform_fit(self, x):
        # per-position centering with one global scale: keeps the absolute
        # level information (the trace channel) intact across positions
        logs = self._log(x)
        self.mean_ = logs.mean(axis=0)
        spread = max(float((logs - self.mean_).std()), 1e-12)
        self.scale_ = np.full(logs.shape[1], spread)
        return (logs - self.mean_) / self.scale_

    def _transform(self, x):
        return (self._log(x) - self.mean_) / self.scale_

    def _build(self, x, classes):
        return build_cnn_net(x.shape[1], classes, self.channels, self.kernel,
                             self.seed)

    def _shape(self, x):
        return x[:, None, :]
