"""Path transforms: lead-lag channel doubling and time reversal.

The lead-lag transform interleaves each path with a one-step-ahead copy of
itself, producing 2d channels over 2M segments: lag channels come first
(indices 0..d-1), lead channels second (d..2d-1).  The antisymmetric part
of the level-2 signature of the transformed path encodes the discrete
quadratic (co)variation of the original; with this channel order the
per-channel signed area S(lag_i, lead_i) - S(lead_i, lag_i) equals
MINUS the sum of squared increments (fixed by the one-segment case).
Timestamps are never materialized; signatures are parametrization
invariant.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .sigcore import PathBatch, as_path_batch


class LeadLagBatch(PathBatch):
    """A lead-lag transformed PathBatch; remembers the base dimension."""

    def __init__(self, samples, base_d: int, dtype=None):
        super().__init__(samples, dtype=dtype)
        self.base_d = base_d


def lead_lag(paths) -> LeadLagBatch:
    """Lead-lag transform: (B, M+1, d) samples to (B, 2M+1, 2d).

    Even points carry (X_k, X_k), odd points (X_k, X_{k+1}); lag block
    first, lead block second.
    """
    paths = as_path_batch(paths)
    if paths.M < 1:
        raise DomainError("lead-lag needs at least one segment")
    B, M, d = paths.B, paths.M, paths.d
    x = paths.samples
    out = np.empty((B, 2 * M + 1, 2 * d), dtype=x.dtype)
    out[:, 0::2, :d] = x  # lag at even points
    out[:, 0::2, d:] = x  # lead at even points
    out[:, 1::2, :d] = x[:, :-1]  # lag holds at odd points
    out[:, 1::2, d:] = x[:, 1:]  # lead jumps ahead
    return LeadLagBatch(out, base_d=d)


def time_reverse(paths) -> PathBatch:
    """Reverse the sample order of every path."""
    paths = as_path_batch(paths)
    return PathBatch(paths.samples[:, ::-1].copy())
