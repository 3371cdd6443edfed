"""From-scratch float64 layers with forward/backward passes.

Dense inputs are (batch, features); convolutional inputs are
(batch, channels, length).  Each layer caches what its backward pass needs,
so forward(train=True) must precede backward within a step.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Dense", "ReLU", "Dropout", "Conv1d", "BatchNorm1d", "MaxPool1d",
           "GlobalAvgPool", "Affine", "softmax", "cross_entropy", "Layer"]


class Layer:
    """Base layer: stateless unless it declares parameters."""

    def forward(self, x: np.ndarray, train: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> list[np.ndarray]:
        return []

    def grads(self) -> list[np.ndarray]:
        return []


class Dense(Layer):
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        # He-style scaling keeps ReLU stacks from dying at init
        self.w = rng.standard_normal((in_dim, out_dim)) * np.sqrt(2.0 / in_dim)
        self.b = np.zeros(out_dim)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._x = None

    def forward(self, x, train=False):
        if x.shape[1] != self.w.shape[0]:
            raise ValueError(f"dense layer expects {self.w.shape[0]} inputs, "
                             f"got {x.shape[1]}")
        self._x = x
        return x @ self.w + self.b

    def backward(self, grad):
        self.gw[...] = self._x.T @ grad
        self.gb[...] = grad.sum(axis=0)
        return grad @ self.w.T

    def params(self):
        return [self.w, self.b]

    def grads(self):
        return [self.gw, self.gb]


class ReLU(Layer):
    def forward(self, x, train=False):
        self._mask = x > 0
        return x * self._mask

    def backward(self, grad):
        return grad * self._mask


class Dropout(Layer):
    """Inverted dropout; identity in eval mode and at rate 0."""

    def __init__(self, rate: float):
        if not 0 <= rate < 1:
            raise ValueError("dropout rate must be in [0, 1)")
        self.rate = rate
        self.rng: np.random.Generator | None = None
        self._mask = None

    def forward(self, x, train=False):
        if not train or self.rate == 0.0:
            self._mask = None
            return x
        if self.rng is None:
            raise RuntimeError("dropout needs an rng before training "
                               "(assigned by the trainer)")
        self._mask = (self.rng.random(x.shape) >= self.rate) / (1.0 - self.rate)
        return x * self._mask

    def backward(self, grad):
        return grad if self._mask is None else grad * self._mask


class Conv1d(Layer):
    """1-D convolution, stride 1, zero-padded to keep the length ("same")."""

    def __init__(self, in_ch: int, out_ch: int, kernel: int,
                 rng: np.random.Generator):
        if kernel % 2 != 1:
            raise ValueError("only odd kernels are supported (same padding)")
        fan_in = in_ch * kernel
        self.w = rng.standard_normal((out_ch, in_ch, kernel)) * np.sqrt(2.0 / fan_in)
        self.b = np.zeros(out_ch)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self.kernel = kernel
        self._cols = None
        self._in_shape = None

    def forward(self, x, train=False):
        bsz, c, length = x.shape
        if c != self.w.shape[1]:
            raise ValueError(f"conv expects {self.w.shape[1]} channels, got {c}")
        pad = self.kernel // 2
        xp = np.pad(x, ((0, 0), (0, 0), (pad, pad)))
        windows = np.lib.stride_tricks.sliding_window_view(xp, self.kernel, axis=2)
        # (B, C, L, k) -> (B*L, C*k) so the convolution is one GEMM
        cols = windows.transpose(0, 2, 1, 3).reshape(bsz * length, c * self.kernel)
        self._cols = cols
        self._in_shape = (bsz, c, length)
        out = cols @ self.w.reshape(self.w.shape[0], -1).T + self.b
        return out.reshape(bsz, length, -1).transpose(0, 2, 1)

    def backward(self, grad):
        bsz, c, length = self._in_shape
        out_ch = self.w.shape[0]
        g2 = grad.transpose(0, 2, 1).reshape(bsz * length, out_ch)
        self.gw[...] = (g2.T @ self._cols).reshape(self.w.shape)
        self.gb[...] = g2.sum(axis=0)
        pad = self.kernel // 2
        gxp = np.zeros((bsz, c, length + 2 * pad))
        for t in range(self.kernel):
            # y[b,o,l] consumed xp[b,c,l+t]; scatter the matching slice back
            gxp[:, :, t:t + length] += np.einsum(
                "bol,oc->bcl", grad, self.w[:, :, t], optimize=True)
        return gxp[:, :, pad:pad + length]

    def params(self):
        return [self.w, self.b]

    def grads(self):
        return [self.gw, self.gb]


class BatchNorm1d(Layer):
    """Per-channel normalization over (batch, length); running stats for eval."""

    def __init__(self, channels: int, momentum: float = 0.1, eps: float = 1e-5):
        self.gamma = np.ones(channels)
        self.beta = np.zeros(channels)
        self.ggamma = np.zeros(channels)
        self.gbeta = np.zeros(channels)
        self.running_mean = np.zeros(channels)
        self.running_var = np.ones(channels)
        self.momentum = momentum
        self.eps = eps

    def forward(self, x, train=False):
        if train:
            mean = x.mean(axis=(0, 2))
            var = x.var(axis=(0, 2))
            self.running_mean += self.momentum * (mean - self.running_mean)
            self.running_var += self.momentum * (var - self.running_var)
        else:
            mean, var = self.running_mean, self.running_var
        self._inv_std = 1.0 / np.sqrt(var + self.eps)
        self._xhat = (x - mean[None, :, None]) * self._inv_std[None, :, None]
        self._train = train
        return self.gamma[None, :, None] * self._xhat + self.beta[None, :, None]

    def backward(self, grad):
        self.ggamma[...] = (grad * self._xhat).sum(axis=(0, 2))
        self.gbeta[...] = grad.sum(axis=(0, 2))
        gxhat = grad * self.gamma[None, :, None]
        if not self._train:
            return gxhat * self._inv_std[None, :, None]
        n = grad.shape[0] * grad.shape[2]
        mean_g = gxhat.mean(axis=(0, 2))
        mean_gx = (gxhat * self._xhat).mean(axis=(0, 2))
        return (self._inv_std[None, :, None]
                * (gxhat - mean_g[None, :, None]
                   - self._xhat * mean_gx[None, :, None]))

    def params(self):
        return [self.gamma, self.beta]

    def grads(self):
        return [self.ggamma, self.gbeta]


class MaxPool1d(Layer):
    """Non-overlapping max pooling; a trailing odd element is dropped."""

    def __init__(self, pool: int = 2):
        if pool < 1:
            raise ValueError("pool size must be >= 1")
        self.pool = pool

    def forward(self, x, train=False):
        bsz, c, length = x.shape
        out_len = length // self.pool
        trimmed = x[:, :, :out_len * self.pool].reshape(bsz, c, out_len, self.pool)
        self._argmax = trimmed.argmax(axis=3)
        self._in_len = length
        return trimmed.max(axis=3)

    def backward(self, grad):
        bsz, c, out_len = grad.shape
        gx = np.zeros((bsz, c, self._in_len))
        view = gx[:, :, :out_len * self.pool].reshape(bsz, c, out_len, self.pool)
        np.put_along_axis(view, self._argmax[..., None], grad[..., None], axis=3)
        return gx


class GlobalAvgPool(Layer):
    """(B, C, L) -> (B, C) by averaging over length."""

    def forward(self, x, train=False):
        self._length = x.shape[2]
        return x.mean(axis=2)

    def backward(self, grad):
        return np.repeat(grad[:, :, None], self._length, axis=2) / self._length


class Affine(Layer):
    """Frozen elementwise affine along the last axis.

    Carries input standardization inside exported models; not trained
    (params() stays empty), gradients still flow through.
    """

    def __init__(self, scale, shift):
        self.scale = np.asarray(scale, dtype=np.float64)
        self.shift = np.asarray(shift, dtype=np.float64)
        if self.scale.shape != self.shift.shape or self.scale.ndim != 1:
            raise ValueError("scale and shift must be matching 1-D arrays")

    def forward(self, x, train=False):
        return x * self.scale + self.shift

    def backward(self, grad):
        return grad * self.scale


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def cross_entropy(logits: np.ndarray, labels: np.ndarray):
    """Mean cross-entropy over the batch and its gradient w.r.t. the logits.

    ``labels`` are integer class indices.
    """
    probs = softmax(logits)
    n = logits.shape[0]
    picked = probs[np.arange(n), labels]
    loss = float(-np.log(np.maximum(picked, 1e-300)).mean())
    grad = probs.copy()
    grad[np.arange(n), labels] -= 1.0
    return loss, grad / n
