"""Numba kernels behind the forward, windowed and backward passes.

The work unit mirrors the per-word update scheme: each (path, word) unit
owns a scratch stack holding the signature values on the word's prefixes
and replays the Horner-form Chen update over the increments.  Units write
disjoint outputs, so results are bitwise independent of the thread count.
All summation orders are fixed; fastmath stays off to keep them.
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np
from numba import config as _nb_config
from numba import get_num_threads, njit, prange, set_num_threads


def max_threads() -> int:
    """Size of the numba thread pool (fixed at process start)."""
    return int(_nb_config.NUMBA_NUM_THREADS)


@contextmanager
def thread_limit(threads: int | None):
    """Temporarily cap the numba worker pool; None leaves it untouched."""
    if threads is None:
        yield
        return
    if threads < 1:
        raise ValueError(f"thread count must be >= 1, got {threads}")
    previous = get_num_threads()
    set_num_threads(min(threads, max_threads()))
    try:
        yield
    finally:
        set_num_threads(previous)


@njit(parallel=True, cache=True)
def forward_kernel(incr, letters, lengths, inv, out):
    # incr: (B, M, d); letters: (W, max_len); lengths: (W,); inv[k] = 1/k;
    # out: (B, W).  One unit per (path, word), scratch of |w|+1 values.
    B, M, _ = incr.shape
    W = lengths.shape[0]
    for unit in prange(B * W):
        b = unit // W
        wi = unit % W
        n = lengths[wi]
        scratch = np.zeros(n + 1, dtype=incr.dtype)
        scratch[0] = 1.0
        for j in range(M):
            for m in range(n, 0, -1):
                h = 0.0
                for k in range(m):
                    h = incr[b, j, letters[wi, k]] * inv[m - k] * (scratch[k] + h)
                scratch[m] += h
        out[b, wi] = scratch[n]


@njit(parallel=True, cache=True)
def windows_kernel(incr, letters, lengths, bounds, inv, out):
    # bounds: (K, 2) sample indices (l, r); out: (B, K, W).  Each unit
    # replays the increments l..r-1 of its window independently.
    B, _, _ = incr.shape
    K = bounds.shape[0]
    W = lengths.shape[0]
    for unit in prange(B * K * W):
        b = unit // (K * W)
        rest = unit % (K * W)
        k_win = rest // W
        wi = rest % W
        n = lengths[wi]
        scratch = np.zeros(n + 1, dtype=incr.dtype)
        scratch[0] = 1.0
        for j in range(bounds[k_win, 0], bounds[k_win, 1]):
            for m in range(n, 0, -1):
                h = 0.0
                for k in range(m):
                    h = incr[b, j, letters[wi, k]] * inv[m - k] * (scratch[k] + h)
                scratch[m] += h
        out[b, k_win, wi] = scratch[n]


@njit(parallel=True, cache=True)
def backward_kernel(
    incr,
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
    inc_grads,
):
    # Reverse sweep per (path, word): recompute the terminal prefix stack,
    # then walk j = M..1 reconstructing prefix values (left, via exp(-dX))
    # and suffix values (right, via exp(+dX)) while accumulating the
    # increment gradients.  Paths run in parallel; words stay sequential so
    # the per-increment accumulation order is fixed.
    B, M, d = incr.shape
    W = lengths.shape[0]
    for b in prange(B):
        left = left_buf[b]
        right = right_buf[b]
        dh = dh_buf[b]
        acc = acc_buf[b]
        ckpt = ckpt_buf[b]
        for wi in range(W):
            g = upstream[b, wi]
            if g == 0.0:
                continue
            n = lengths[wi]
            # forward replay to the terminal prefix stack
            left[0] = 1.0
            for k in range(1, n + 1):
                left[k] = 0.0
            if stride > 0:
                for k in range(n + 1):
                    ckpt[0, k] = left[k]
            for j in range(M):
                for m in range(n, 0, -1):
                    h = 0.0
                    for k in range(m):
                        h = incr[b, j, letters[wi, k]] * inv[m - k] * (left[k] + h)
                    left[m] += h
                if stride > 0 and (j + 1) % stride == 0:
                    for k in range(n + 1):
                        ckpt[(j + 1) // stride, k] = left[k]
            right[0] = 1.0
            for k in range(1, n + 1):
                right[k] = 0.0
            for j in range(M - 1, -1, -1):
                # left <- values at t_j (start of the increment)
                if stride > 0 and j % stride == 0:
                    for k in range(n + 1):
                        left[k] = ckpt[j // stride, k]
                else:
                    for m in range(n, 0, -1):
                        h = 0.0
                        for k in range(m):
                            h = (
                                -incr[b, j, letters[wi, k]]
                                * inv[m - k]
                                * (left[k] + h)
                            )
                        left[m] += h
                # d/d(incr_j) of sum_q S_{0,t_{j+1}}(w_[q]) * right[n-q],
                # differentiating the Horner recursion for each prefix length
                for i in range(d):
                    acc[i] = 0.0
                for q in range(1, n + 1):
                    h = 0.0
                    for i in range(d):
                        dh[i] = 0.0
                    for k in range(q):
                        lett = letters[wi, k]
                        a = incr[b, j, lett]
                        s = inv[q - k]
                        tmp = left[k] + h
                        for i in range(d):
                            dh[i] = s * a * dh[i]
                        dh[lett] += s * tmp
                        h = s * a * tmp
                    rv = right[n - q]
                    for i in range(d):
                        acc[i] += rv * dh[i]
                for i in range(d):
                    inc_grads[b, j, i] += g * acc[i]
                # right <- values at t_j
                for m in range(n, 0, -1):
                    h = 0.0
                    for p in range(m, 0, -1):
                        h = (
                            incr[b, j, letters[wi, n - m + p - 1]]
                            * inv[p]
                            * (right[m - p] + h)
                        )
                    right[m] += h
