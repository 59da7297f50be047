"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numpy as np

from .errors import ShapeError, WindowError


def check_paths(X, dtype=None) -> np.ndarray:
    """Validate a batch of paths as a (B, M+1, d) float array."""
    arr = np.asarray(X)
    if arr.ndim == 2:
        raise ShapeError(
            "expected a 3-d array of shape (n_paths, n_samples, n_channels); "
            "reshape a single path with X[None, :, :]"
        )
    if arr.ndim != 3:
        raise ShapeError(
            f"expected shape (n_paths, n_samples, n_channels), got {arr.shape}"
        )
    if dtype is not None:
        arr = arr.astype(dtype, copy=False)
    elif arr.dtype not in (np.float32, np.float64):
        arr = arr.astype(np.float64)
    return arr


def check_window_pairs(windows) -> np.ndarray:
    """Validate window index pairs as a (K, 2) integer array with l < r."""
    arr = np.asarray(windows, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise WindowError(f"windows must have shape (K, 2), got {arr.shape}")
    if arr.shape[0] == 0:
        raise WindowError("need at least one window")
    if np.any(arr[:, 0] < 0) or np.any(arr[:, 0] >= arr[:, 1]):
        raise WindowError("windows must satisfy 0 <= l < r")
    return arr
