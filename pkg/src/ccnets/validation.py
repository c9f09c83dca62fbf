"""Input checks shared by the estimator entry points."""
from __future__ import annotations

import numpy as np

from .errors import DimensionError, DomainError, NumericError


def check_matrix(x, name: str = "X") -> np.ndarray:
    """2-D finite float64 feature matrix."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise DomainError(f"{name} has no rows")
    if not np.all(np.isfinite(arr)):
        raise NumericError(f"{name} contains non-finite values")
    return arr


def check_binary_labels(y, n_rows: int, name: str = "y") -> np.ndarray:
    """Column of {0, 1} labels aligned with the feature matrix."""
    arr = np.asarray(y, dtype=np.float64).reshape(-1, 1)
    if len(arr) != n_rows:
        raise DimensionError(f"{name} has {len(arr)} rows, expected {n_rows}")
    if not np.all(np.isin(arr, (0.0, 1.0))):
        raise DomainError(f"{name} must contain only 0/1 labels")
    return arr
