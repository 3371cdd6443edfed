"""Estimator parameter protocol and input validation helpers."""

from __future__ import annotations

import inspect

import numpy as np


class ParamsMixin:
    """get_params/set_params following the scikit-learn estimator protocol.

    Constructor arguments are stored verbatim on the instance under the same
    names, so estimators built on this mixin clone cleanly with
    ``sklearn.base.clone`` without importing scikit-learn here.
    """

    @classmethod
    def _param_names(cls):
        sig = inspect.signature(cls.__init__)
        return [n for n, p in sig.parameters.items()
                if n != "self" and p.kind != p.VAR_KEYWORD]

    def get_params(self, deep=True):
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(f"unknown parameter {name!r} for "
                                 f"{type(self).__name__}; valid: {sorted(valid)}")
            setattr(self, name, value)
        return self

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


def as_complex_matrix(x, name="x"):
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={a.ndim}")
    return a


def as_float_vector(x, name="x"):
    a = np.asarray(x, dtype=np.float64).ravel()
    if a.size == 0:
        raise ValueError(f"{name} must be non-empty")
    return a


def as_sample_matrix(x, name="X"):
    """Coerce a batch input to (n_samples, n_features) float64."""
    a = np.asarray(x, dtype=np.float64)
    if a.ndim == 1:
        a = a[None, :]
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D (n_samples, n_features)")
    return a


def require_finite(a, name="array"):
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def require_positive(value, name):
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value
