"""Exact reverse-mode gradients of signature coefficients w.r.t. the path.

The backward pass never stores intermediate signatures.  For each word it
recomputes the terminal values on the word's prefixes, then sweeps time
backwards: prefix values are pulled back by multiplying with exp(-dX)
(the group inverse of a segment), suffix values are pushed back with
exp(+dX), and the per-increment gradient falls out of differentiating the
Horner-form Chen step.  Peak extra memory is O(B * max|w|), independent of
the number of segments.

Because multiplying by exp(-dX) loses precision over very long sequences,
an optional checkpoint stride stores the prefix stack every c steps during
the recomputation and reloads it during the sweep, trading memory for
accuracy.  Default is off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DomainError, ShapeError
from .sigcore import PathBatch, as_path_batch
from .words import Word, decode_word
from .wordsets import WordSet


@dataclass
class GradBatch:
    """Gradients produced by one backward pass.

    upstream holds dL/dS(w) per emitted word, increment_grads dL/d(dX_j),
    and path_grads the telescoped dL/dX_j.  Because the signature depends
    on increments only, each channel's path gradients sum to zero.
    """

    upstream: np.ndarray
    increment_grads: np.ndarray
    path_grads: np.ndarray


def exp_coeff_grad(delta: Sequence[float], b: Word, channel: int) -> float:
    """d exp(delta, b) / d delta[channel] for one segment-exponential factor."""
    letters = decode_word(b, len(delta))
    total = 0.0
    for r, letter in enumerate(letters):
        if letter != channel:
            continue
        prod = 1.0
        for s, other in enumerate(letters):
            if s != r:
                prod *= float(delta[other])
        total += prod
    return total / math.factorial(b.length)


def _exp_of(delta: np.ndarray, letters: tuple[int, ...]) -> float:
    prod = 1.0
    for letter in letters:
        prod *= float(delta[letter])
    return prod / math.factorial(len(letters))


def left_step(
    left: np.ndarray, letters: tuple[int, ...], delta: np.ndarray
) -> np.ndarray:
    """Pull prefix values one step back: S_{0,t_j} from S_{0,t_{j+1}}.

    left[k] is the value at the length-k prefix; delta is the increment of
    the segment [t_j, t_{j+1}].  Uses the group inverse exp(-delta).
    """
    n = len(letters)
    neg = -np.asarray(delta, dtype=np.float64)
    out = np.empty_like(left)
    for m in range(n + 1):
        out[m] = sum(
            left[k] * _exp_of(neg, letters[k:m]) for k in range(m + 1)
        )
    return out


def right_step(
    right: np.ndarray, letters: tuple[int, ...], delta: np.ndarray
) -> np.ndarray:
    """Pull suffix values one step back: S_{t_j,T} from S_{t_{j+1},T}.

    right[k] is the value at the length-k suffix (the last k letters).
    """
    n = len(letters)
    delta = np.asarray(delta, dtype=np.float64)
    out = np.empty_like(right)
    for m in range(n + 1):
        out[m] = sum(
            _exp_of(delta, letters[n - m : n - k]) * right[k] for k in range(m + 1)
        )
    return out


@dataclass
class ReconstructionState:
    """Per-word backward-sweep state: prefix and suffix signature values.

    At the terminal time the prefix values equal the stored terminal
    signature restricted to the word's prefixes and the suffix values are
    the identity.  step_back moves both one segment earlier.
    """

    letters: tuple[int, ...]
    left: np.ndarray
    right: np.ndarray

    @classmethod
    def terminal(
        cls, letters: tuple[int, ...], terminal_left: np.ndarray
    ) -> "ReconstructionState":
        n = len(letters)
        right = np.zeros(n + 1, dtype=np.float64)
        right[0] = 1.0
        return cls(letters, np.asarray(terminal_left, dtype=np.float64).copy(), right)

    def step_back(self, delta: np.ndarray) -> None:
        self.left = left_step(self.left, self.letters, delta)
        self.right = right_step(self.right, self.letters, delta)


def increment_to_sample_grads(increment_grads: np.ndarray) -> np.ndarray:
    """Chain rule from increment gradients to sample gradients.

    dL/dX_j = dL/d(dX_j) - dL/d(dX_{j+1}) with the one-sided boundary
    terms at j = 0 and j = M; columns telescope to zero.
    """
    increment_grads = np.asarray(increment_grads, dtype=np.float64)
    if increment_grads.ndim != 3:
        raise ShapeError(
            f"increment gradients must have shape (B, M, d), got "
            f"{increment_grads.shape}"
        )
    B, M, d = increment_grads.shape
    out = np.zeros((B, M + 1, d), dtype=np.float64)
    for b in range(B):  # contiguous per-path views, no ufunc buffering
        np.add(out[b, 1:], increment_grads[b], out=out[b, 1:])
        np.subtract(out[b, :-1], increment_grads[b], out=out[b, :-1])
    return out


def signature_backward(
    paths,
    ws: WordSet,
    upstream: np.ndarray,
    threads: int | None = None,
    checkpoint_stride: int | None = None,
) -> GradBatch:
    """Path gradients of a weighted sum of signature coefficients.

    upstream carries dL/dS(w) per word in the set's canonical order (a
    leading epsilon column is accepted and ignored when the set exposes
    one; the epsilon coefficient is constant).  The word set must match
    the one used in the forward pass; that cannot be checked here.
    Computation is float64 regardless of the input dtype.
    """
    paths = as_path_batch(paths)
    if paths.dtype != np.float64:
        paths = PathBatch(paths.samples, dtype=np.float64)
    if len(ws) < 1:
        raise DomainError("word set has no words to differentiate")
    if ws.d != paths.d:
        raise ShapeError(f"word set has d={ws.d} but paths have {paths.d} channels")
    upstream = np.ascontiguousarray(np.asarray(upstream, dtype=np.float64))
    if upstream.ndim != 2 or upstream.shape[0] != paths.B:
        raise ShapeError(
            f"upstream must have shape ({paths.B}, {len(ws)}), got {upstream.shape}"
        )
    if ws.include_empty and upstream.shape[1] == len(ws) + 1:
        upstream = np.ascontiguousarray(upstream[:, 1:])
    if upstream.shape[1] != len(ws):
        raise ShapeError(
            f"upstream must have {len(ws)} word columns, got {upstream.shape[1]}"
        )
    if checkpoint_stride is not None and checkpoint_stride < 1:
        raise DomainError(f"checkpoint stride must be >= 1, got {checkpoint_stride}")

    B, M, d = paths.B, paths.M, paths.d
    maxn = ws.max_len
    letters = np.ascontiguousarray(ws.letters)
    lengths = np.ascontiguousarray(ws.lengths)
    inv = np.zeros(maxn + 1, dtype=np.float64)
    inv[1:] = 1.0 / np.arange(1, maxn + 1, dtype=np.float64)

    stride = int(checkpoint_stride or 0)
    n_ckpt = (M // stride + 1) if stride > 0 else 1
    left_buf = np.zeros((B, maxn + 1), dtype=np.float64)
    right_buf = np.zeros((B, maxn + 1), dtype=np.float64)
    dh_buf = np.zeros((B, d), dtype=np.float64)
    acc_buf = np.zeros((B, d), dtype=np.float64)
    ckpt_buf = np.zeros((B, n_ckpt, maxn + 1), dtype=np.float64)
    increment_grads = np.zeros((B, M, d), dtype=np.float64)

    with _kernels.thread_limit(threads):
        _kernels.backward_kernel(
            paths.increments,
            letters,
            lengths,
            upstream,
            inv,
            stride,
            left_buf,
            right_buf,
            dh_buf,
            acc_buf,
            ckpt_buf,
            increment_grads,
        )
    return GradBatch(
        upstream=upstream,
        increment_grads=increment_grads,
        path_grads=increment_to_sample_grads(increment_grads),
    )
