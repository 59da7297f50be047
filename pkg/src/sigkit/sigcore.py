"""Forward signature computation and truncated tensor-algebra utilities.

The forward pass iterates the word-wise Chen update in Horner form over
the path increments: for a word w of length n, one step costs O(n^2) using
only the signature values on w's prefixes.  Work units are (path, word)
pairs [(path, window, word) for windowed evaluation], each with its own
O(|w|) scratch, so units are independent and outputs deterministic.

Concatenation (Chen product) and inversion of coefficient batches are
provided for fully truncated word sets, where the prefix-suffix closure
needed by the product is guaranteed to be present.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import (
    DomainError,
    ShapeError,
    UnsupportedWordSetError,
    WindowError,
)
from .words import Word, decode_word
from .wordsets import WordSet

SUPPORTED_DTYPES = (np.float64, np.float32)


class PathBatch:
    """B piecewise-linear paths sampled at M+1 points in R^d.

    Increments are derived lazily and cached.  Values must be finite unless
    NaN propagation is explicitly requested via allow_nonfinite.
    """

    def __init__(self, samples, dtype=None, allow_nonfinite: bool = False):
        arr = np.asarray(samples)
        if dtype is not None:
            arr = arr.astype(dtype, copy=False)
        elif arr.dtype not in (np.float32, np.float64):
            arr = arr.astype(np.float64)
        if arr.dtype not in SUPPORTED_DTYPES:
            raise ShapeError(f"unsupported dtype {arr.dtype}; use float64 or float32")
        if arr.ndim != 3:
            raise ShapeError(
                f"samples must have shape (B, M+1, d), got {arr.shape}"
            )
        if arr.shape[1] < 1:
            raise ShapeError("paths need at least one sample point")
        if not allow_nonfinite and not np.all(np.isfinite(arr)):
            raise DomainError(
                "samples contain non-finite values; pass allow_nonfinite=True "
                "to propagate them"
            )
        self.samples = np.ascontiguousarray(arr)

    @property
    def B(self) -> int:
        return self.samples.shape[0]

    @property
    def M(self) -> int:
        return self.samples.shape[1] - 1

    @property
    def d(self) -> int:
        return self.samples.shape[2]

    @property
    def dtype(self):
        return self.samples.dtype

    @functools.cached_property
    def increments(self) -> np.ndarray:
        """Per-segment increments, shape (B, M, d)."""
        # per-path contiguous subtraction keeps the ufunc unbuffered, so the
        # backward pass allocates nothing proportional to M beyond this array
        out = np.empty((self.B, self.M, self.d), dtype=self.dtype)
        for b in range(self.B):
            np.subtract(self.samples[b, 1:], self.samples[b, :-1], out=out[b])
        return out


def as_path_batch(paths, dtype=None) -> PathBatch:
    """Coerce an array or PathBatch to a PathBatch."""
    if isinstance(paths, PathBatch):
        return paths
    return PathBatch(paths, dtype=dtype)


@dataclass
class CoefficientBatch:
    """Signature coefficients of B paths over a WordSet.

    Column k holds the coefficient of wordset.words[k]; when the word set
    exposes the empty word, a leading column of ones is prepended.
    """

    wordset: WordSet
    values: np.ndarray

    def __post_init__(self):
        expected = self.wordset.width
        if self.values.ndim != 2 or self.values.shape[1] != expected:
            raise ShapeError(
                f"coefficient values must have shape (B, {expected}), "
                f"got {self.values.shape}"
            )

    @property
    def B(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def word_values(self) -> np.ndarray:
        """Columns for the non-empty words only."""
        return self.values[:, 1:] if self.wordset.include_empty else self.values

    def column_names(self) -> list[str]:
        names = self.wordset.word_strings()
        return (["e"] + names) if self.wordset.include_empty else names

    def __array__(self, dtype=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True)
class WindowSpec:
    """K windows over the sample axis as (l, r) index pairs, l < r."""

    pairs: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.pairs, dtype=np.int64))
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise WindowError(f"window pairs must have shape (K, 2), got {arr.shape}")
        object.__setattr__(self, "pairs", arr)
        if arr.shape[0] == 0:
            raise WindowError("need at least one window")
        if np.any(arr[:, 0] < 0) or np.any(arr[:, 0] >= arr[:, 1]):
            raise WindowError("windows must satisfy 0 <= l < r")

    @property
    def K(self) -> int:
        return self.pairs.shape[0]

    def validate_for(self, M: int) -> None:
        if np.any(self.pairs[:, 1] > M):
            bad = self.pairs[self.pairs[:, 1] > M][0]
            raise WindowError(
                f"window ({bad[0]}, {bad[1]}) exceeds the last sample index {M}"
            )


# -- per-word scalar operations (reference implementations) --------------------


def segment_exp_coeff(delta: Sequence[float], w: Word) -> float:
    """Coefficient of the one-segment signature exp(delta) at word w.

    Equals the product of the increment entries along w divided by |w|!.
    """
    letters = decode_word(w, len(delta))
    prod = 1.0
    for letter in letters:
        prod *= float(delta[letter])
    return prod / math.factorial(w.length)


def horner_update(prev: Sequence[float], delta: Sequence[float], w: Word) -> float:
    """One Chen step for word w in Horner form.

    prev holds the current values on w's prefixes, prev[k] for the length-k
    prefix with prev[0] = 1.  Returns the updated value at w after the
    segment with increment delta.
    """
    letters = decode_word(w, len(delta))
    n = w.length
    if len(prev) != n + 1:
        raise ShapeError(f"need {n + 1} prefix values, got {len(prev)}")
    h = 0.0
    for k in range(n):
        h = float(delta[letters[k]]) / (n - k) * (float(prev[k]) + h)
    return float(prev[n]) + h


# -- batched forward passes -----------------------------------------------------


def _kernel_tables(ws: WordSet, dtype):
    letters = np.ascontiguousarray(ws.letters)
    lengths = np.ascontiguousarray(ws.lengths)
    inv = np.zeros(ws.max_len + 1, dtype=dtype)
    inv[1:] = 1.0 / np.arange(1, ws.max_len + 1, dtype=dtype)
    return letters, lengths, inv


def _check_compute(paths: PathBatch, ws: WordSet) -> None:
    if len(ws) < 1:
        raise DomainError("word set has no words to compute")
    if ws.d != paths.d:
        raise ShapeError(
            f"word set has d={ws.d} but paths have {paths.d} channels"
        )


def _attach_empty(ws: WordSet, values: np.ndarray) -> np.ndarray:
    if not ws.include_empty:
        return values
    out = np.empty((values.shape[0], values.shape[1] + 1), dtype=values.dtype)
    out[:, 0] = 1.0
    out[:, 1:] = values
    return out


def signature_forward(paths, ws: WordSet, threads: int | None = None) -> CoefficientBatch:
    """Signature coefficients of each path at every word of the set.

    A path with zero segments yields the identity signature (all non-empty
    coefficients zero).
    """
    paths = as_path_batch(paths)
    _check_compute(paths, ws)
    letters, lengths, inv = _kernel_tables(ws, paths.dtype)
    out = np.empty((paths.B, len(ws)), dtype=paths.dtype)
    with _kernels.thread_limit(threads):
        _kernels.forward_kernel(paths.increments, letters, lengths, inv, out)
    return CoefficientBatch(ws, _attach_empty(ws, out))


def signature_windows(
    paths, ws: WordSet, windows: WindowSpec, threads: int | None = None
) -> list[CoefficientBatch]:
    """Independent signatures over K sample-index windows, one batch each.

    Window i covers samples l_i..r_i; outputs are not chained through
    Chen's relation, each window replays its own increments.
    """
    paths = as_path_batch(paths)
    _check_compute(paths, ws)
    if not isinstance(windows, WindowSpec):
        windows = WindowSpec(np.asarray(windows))
    windows.validate_for(paths.M)
    letters, lengths, inv = _kernel_tables(ws, paths.dtype)
    out = np.empty((paths.B, windows.K, len(ws)), dtype=paths.dtype)
    with _kernels.thread_limit(threads):
        _kernels.windows_kernel(
            paths.increments, letters, lengths, windows.pairs, inv, out
        )
    return [
        CoefficientBatch(ws, _attach_empty(ws, out[:, k, :])) for k in range(windows.K)
    ]


# -- truncated tensor-algebra operations ----------------------------------------


def _require_truncated(ws: WordSet) -> int:
    if not ws.is_full_truncation:
        raise UnsupportedWordSetError(
            "this operation needs a fully truncated word set (all words of "
            f"length 1..N); got kind={ws.kind!r} with {len(ws)} words"
        )
    return ws.max_len


def _full_offsets(d: int, N: int) -> list[int]:
    """Start offset of each level 0..N in the epsilon-first dense layout."""
    offsets = [0]
    for n in range(N + 1):
        offsets.append(offsets[-1] + d**n)
    return offsets  # length N+2, last entry is the total width


def _to_full(batch: CoefficientBatch) -> np.ndarray:
    """Dense layout with the epsilon coefficient (=1) in column 0."""
    vals = batch.word_values
    out = np.empty((vals.shape[0], vals.shape[1] + 1), dtype=vals.dtype)
    out[:, 0] = 1.0
    out[:, 1:] = vals
    return out


def _from_full(ws: WordSet, full: np.ndarray) -> CoefficientBatch:
    values = full[:, 1:] if not ws.include_empty else full
    return CoefficientBatch(ws, np.ascontiguousarray(values))


def _tensor_mul_full(x: np.ndarray, y: np.ndarray, d: int, N: int) -> np.ndarray:
    """Graded product of dense truncated tensors: out_n = sum x_m (x) y_{n-m}."""
    off = _full_offsets(d, N)
    out = np.zeros_like(x)
    B = x.shape[0]
    for n in range(N + 1):
        target = out[:, off[n] : off[n + 1]]
        for m in range(n + 1):
            a = x[:, off[m] : off[m + 1]]
            b = y[:, off[n - m] : off[n - m + 1]]
            target.reshape(B, d**m, d ** (n - m))[...] += (
                a[:, :, None] * b[:, None, :]
            )
    return out


def _tensor_identity(B: int, d: int, N: int, dtype) -> np.ndarray:
    off = _full_offsets(d, N)
    out = np.zeros((B, off[-1]), dtype=dtype)
    out[:, 0] = 1.0
    return out


def chen_concat(a: CoefficientBatch, b: CoefficientBatch) -> CoefficientBatch:
    """Chen product of two coefficient batches over the same truncated set.

    The coefficient at w is the prefix-suffix convolution
    sum_{w = u o v} a(u) b(v), with the empty word contributing a or b.
    """
    N = _require_truncated(a.wordset)
    if a.wordset != b.wordset:
        raise UnsupportedWordSetError("operands must share one truncated word set")
    if a.B != b.B:
        raise ShapeError(f"batch sizes differ: {a.B} vs {b.B}")
    full = _tensor_mul_full(_to_full(a), _to_full(b), a.wordset.d, N)
    return _from_full(a.wordset, full)


def signature_inverse(a: CoefficientBatch) -> CoefficientBatch:
    """Group inverse of a truncated signature batch.

    For a group-like input this is the signature of the time-reversed path;
    chen_concat(a, signature_inverse(a)) is the identity up to roundoff.
    """
    N = _require_truncated(a.wordset)
    d = a.wordset.d
    full = _to_full(a)
    x = full.copy()
    x[:, 0] = 0.0  # strictly positive degrees
    inv = _tensor_identity(a.B, d, N, full.dtype)
    for _ in range(N):
        inv = _tensor_identity(a.B, d, N, full.dtype) - _tensor_mul_full(x, inv, d, N)
    return _from_full(a.wordset, inv)
