"""Shared assertions and generators for the test suite."""

import numpy as np


def rel_err(actual, expected):
    """Max absolute deviation normalized by max(1, |expected|_inf)."""
    actual = np.asarray(actual, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    scale = max(1.0, float(np.max(np.abs(expected))) if expected.size else 0.0)
    return float(np.max(np.abs(actual - expected))) / scale if actual.size else 0.0


def assert_rel_close(actual, expected, tol):
    err = rel_err(actual, expected)
    assert err <= tol, f"relative error {err:.3e} > {tol:.1e}"


def elementwise_rel(actual, expected):
    """Elementwise |a - e| / max(1, |a|, |e|)."""
    actual = np.asarray(actual, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    scale = np.maximum(1.0, np.maximum(np.abs(actual), np.abs(expected)))
    return np.abs(actual - expected) / scale


def assert_elementwise_close(actual, expected, tol):
    err = elementwise_rel(actual, expected)
    worst = float(err.max()) if err.size else 0.0
    assert worst <= tol, f"elementwise relative error {worst:.3e} > {tol:.1e}"


def random_paths(rng, B, M, d, scale=1.0):
    """Random sample arrays in [-scale, scale], shape (B, M+1, d)."""
    return (rng.random((B, M + 1, d)) * 2.0 - 1.0) * scale
