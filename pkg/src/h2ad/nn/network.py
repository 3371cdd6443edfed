"""Sequential network container, SGD training loop, and model file format."""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import NumericError
from .layers import (Affine, BatchNorm1d, Conv1d, Dense, Dropout,
                     GlobalAvgPool, Layer, MaxPool1d, ReLU, cross_entropy,
                     softmax)

__all__ = ["Network", "TrainConfig", "train_network", "save_network",
           "load_network"]

_MODEL_MAGIC = b"H2ADNN01"


class Network:
    def __init__(self, layers: list[Layer]):
        self.layers = layers

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x, train=train)
        return x

    def backward(self, grad: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad

    def params(self) -> list[np.ndarray]:
        return [p for layer in self.layers for p in layer.params()]

    def grads(self) -> list[np.ndarray]:
        return [g for layer in self.layers for g in layer.grads()]

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return softmax(self.forward(x, train=False))

    def seed_dropout(self, rng: np.random.Generator):
        for layer in self.layers:
            if isinstance(layer, Dropout):
                layer.rng = rng

    def state(self) -> list[np.ndarray]:
        out = []
        for layer in self.layers:
            out.extend(p.copy() for p in layer.params())
            if isinstance(layer, BatchNorm1d):
                out.append(layer.running_mean.copy())
                out.append(layer.running_var.copy())
        return out

    def load_state(self, state: list[np.ndarray]):
        it = iter(state)
        for layer in self.layers:
            for p in layer.params():
                p[...] = next(it)
            if isinstance(layer, BatchNorm1d):
                layer.running_mean[...] = next(it)
                layer.running_var[...] = next(it)


@dataclass
class TrainConfig:
    lr: float = 1e-2
    momentum: float = 0.9
    epochs: int = 60
    batch_size: int = 64
    lr_decay: float = 0.5
    decay_every: int = 20
    seed: int = 0


@dataclass
class TrainHistory:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)
    best_epoch: int = -1


def _epoch_loss(net: Network, x: np.ndarray, y: np.ndarray,
                batch: int = 512) -> tuple[float, float]:
    losses, correct = [], 0
    for start in range(0, x.shape[0], batch):
        xb, yb = x[start:start + batch], y[start:start + batch]
        logits = net.forward(xb, train=False)
        loss, _ = cross_entropy(logits, yb)
        losses.append(loss * xb.shape[0])
        correct += int((logits.argmax(axis=1) == yb).sum())
    return sum(losses) / x.shape[0], correct / x.shape[0]


def train_network(net: Network, x_train, y_train, x_val, y_val,
                  cfg: TrainConfig) -> TrainHistory:
    """Mini-batch SGD with momentum and stepped learning-rate decay.

    The parameters with the best validation loss are restored at the end, so
    the final validation loss never exceeds the initial one.  Deterministic
    given (seed, data, config).
    """
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 7]))
    net.seed_dropout(rng)
    velocity = [np.zeros_like(p) for p in net.params()]
    history = TrainHistory()

    val0_loss, _ = _epoch_loss(net, x_val, y_val)
    best_loss, best_state = val0_loss, net.state()
    lr = cfg.lr
    n = x_train.shape[0]

    for epoch in range(cfg.epochs):
        if epoch > 0 and epoch % cfg.decay_every == 0:
            lr *= cfg.lr_decay
        order = rng.permutation(n)
        running = 0.0
        for start in range(0, n, cfg.batch_size):
            sel = order[start:start + cfg.batch_size]
            logits = net.forward(x_train[sel], train=True)
            loss, grad = cross_entropy(logits, y_train[sel])
            if not np.isfinite(loss):
                raise NumericError(
                    f"loss diverged at epoch {epoch} (lr={lr:g}); "
                    "reduce the learning rate")
            running += loss * sel.size
            net.backward(grad)
            for p, g, v in zip(net.params(), net.grads(), velocity):
                v *= cfg.momentum
                v -= lr * g
                p += v
        history.train_loss.append(running / n)
        vloss, vacc = _epoch_loss(net, x_val, y_val)
        history.val_loss.append(vloss)
        history.val_accuracy.append(vacc)
        if vloss < best_loss:
            best_loss, best_state = vloss, net.state()
            history.best_epoch = epoch
    net.load_state(best_state)
    return history


# ---------------------------------------------------------------------------
# model file format: magic, u32 layer count, then per layer
#   u8 type tag, u32 ndim, ndim x u32 dims, float64 payload (type-determined)

def _layer_record(layer: Layer) -> tuple[int, tuple[int, ...], list[np.ndarray]]:
    if isinstance(layer, Dense):
        return 1, layer.w.shape, [layer.w, layer.b]
    if isinstance(layer, ReLU):
        return 2, (), []
    if isinstance(layer, Dropout):
        return 3, (), [np.array([layer.rate])]
    if isinstance(layer, Conv1d):
        return 4, layer.w.shape, [layer.w, layer.b]
    if isinstance(layer, BatchNorm1d):
        return 5, (layer.gamma.size,), [layer.gamma, layer.beta,
                                        layer.running_mean, layer.running_var]
    if isinstance(layer, MaxPool1d):
        return 6, (layer.pool,), []
    if isinstance(layer, GlobalAvgPool):
        return 7, (), []
    if isinstance(layer, Affine):
        return 8, (layer.scale.size,), [layer.scale, layer.shift]
    raise TypeError(f"cannot serialize layer {type(layer).__name__}")


def save_network(path, net: Network) -> None:
    with open(path, "wb") as fh:
        fh.write(_MODEL_MAGIC)
        fh.write(struct.pack("<I", len(net.layers)))
        for layer in net.layers:
            tag, dims, payload = _layer_record(layer)
            fh.write(struct.pack("<BI", tag, len(dims)))
            for d in dims:
                fh.write(struct.pack("<I", d))
            for arr in payload:
                fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_network(path) -> Network:
    rng = np.random.default_rng(0)  # placeholder init, overwritten below
    with open(path, "rb") as fh:
        if fh.read(8) != _MODEL_MAGIC:
            raise ValueError("not a model file")
        (count,) = struct.unpack("<I", fh.read(4))
        layers: list[Layer] = []
        for _ in range(count):
            tag, ndim = struct.unpack("<BI", fh.read(5))
            dims = struct.unpack(f"<{ndim}I", fh.read(4 * ndim)) if ndim else ()

            def read(n):
                return np.frombuffer(fh.read(8 * n), dtype="<f8").copy()

            if tag == 1:
                layer = Dense(dims[0], dims[1], rng)
                layer.w[...] = read(dims[0] * dims[1]).reshape(dims)
                layer.b[...] = read(dims[1])
            elif tag == 2:
                layer = ReLU()
            elif tag == 3:
                layer = Dropout(float(read(1)[0]))
            elif tag == 4:
                layer = Conv1d(dims[1], dims[0], dims[2], rng)
                layer.w[...] = read(dims[0] * dims[1] * dims[2]).reshape(dims)
                layer.b[...] = read(dims[0])
            elif tag == 5:
                layer = BatchNorm1d(dims[0])
                layer.gamma[...] = read(dims[0])
                layer.beta[...] = read(dims[0])
                layer.running_mean[...] = read(dims[0])
                layer.running_var[...] = read(dims[0])
            elif tag == 6:
                layer = MaxPool1d(dims[0])
            elif tag == 7:
                layer = GlobalAvgPool()
            elif tag == 8:
                layer = Affine(read(dims[0]), read(dims[0]))
            else:
                raise ValueError(f"unknown layer tag {tag}")
            layers.append(layer)
    return Network(layers)
