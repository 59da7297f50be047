"""Micro-benchmark helpers: wall-clock timing and allocation accounting.

The allocation accounting uses tracemalloc, which sees numpy buffer
allocations.  For the backward pass, "extra" allocation is everything
beyond the arrays that necessarily scale with the number of segments:
the derived increments, the increment gradients and the sample-gradient
output.  What remains is the reconstruction state, whose size depends on
the batch and the word set but not on the sequence length.
"""

from __future__ import annotations

import statistics
import time
import tracemalloc
from typing import Callable

import numpy as np

from .backward import signature_backward
from .sigcore import PathBatch
from .wordsets import WordSet


def time_call(fn: Callable[[], object], warmup: int = 3, reps: int = 10) -> dict:
    """Median/mean wall time of fn over reps runs after warmup runs."""
    for _ in range(warmup):
        fn()
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return {
        "median_s": statistics.median(times),
        "mean_s": statistics.fmean(times),
        "reps": reps,
        "warmup": warmup,
    }


def measure_peak_allocation(fn: Callable[[], object]) -> tuple[object, int]:
    """Run fn once and return (result, peak traced bytes)."""
    tracemalloc.start()
    try:
        result = fn()
        _, peak = tracemalloc.get_traced_memory()
    finally:
        tracemalloc.stop()
    return result, peak


def backward_extra_allocation(
    samples: np.ndarray, ws: WordSet, upstream: np.ndarray
) -> int:
    """Peak backward-pass allocation beyond the segment-proportional arrays.

    Subtracts the increments (B*M*d), the increment gradients (B*M*d) and
    the sample-gradient output (B*(M+1)*d), all float64.  The remainder
    covers the per-path reconstruction buffers and bookkeeping, which the
    terminal-only storage scheme keeps independent of M.
    """
    paths = PathBatch(np.asarray(samples, dtype=np.float64))
    upstream = np.ascontiguousarray(np.asarray(upstream, dtype=np.float64))
    B, M, d = paths.B, paths.M, paths.d
    _, peak = measure_peak_allocation(lambda: signature_backward(paths, ws, upstream))
    segment_proportional = 8 * B * M * d + 8 * B * M * d + 8 * B * (M + 1) * d
    return max(0, peak - segment_proportional)
