"""Exception types shared across the toolkit."""


class ConfigurationError(ValueError):
    """Inconsistent array geometry, bad config file, or out-of-range group index."""


class ModelOrderError(ValueError):
    """Requested source count is incompatible with the observation dimension."""


class DegenerateSubspaceError(RuntimeError):
    """Signal subspace is numerically rank-deficient for the requested order."""


class InsufficientSupportError(RuntimeError):
    """Fewer surviving clusters than requested sources; retry with a larger radius."""


class IllPosedSceneError(RuntimeError):
    """Fisher information is singular (e.g. duplicate source angles)."""


class DegenerateModelError(ValueError):
    """Covariance model cannot be formed (e.g. zero noise power)."""


class NumericError(RuntimeError):
    """Non-finite values or a diverging computation."""


class ParameterError(ValueError):
    """Sampling or experiment parameters cannot be satisfied."""


class DegenerateSpectrumWarning(UserWarning):
    """All eigenvalues equal; standardization returned zeros."""
