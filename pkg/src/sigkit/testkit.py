"""Independent brute-force oracles for property tests and gradient checks.

Nothing here shares kernel code with the production modules: the dense
oracle materializes full level tensors and multiplies them the slow way,
the shuffle enumerator interleaves letter tuples recursively, and the
finite-difference gradient perturbs one sample coordinate at a time.
They are double precision only and size-guarded; use them for checking
answers, not for producing them.
"""

from __future__ import annotations

import itertools
from collections import Counter
from typing import Sequence

import numpy as np

from .errors import DomainError, ShapeError
from .sigcore import as_path_batch, signature_forward
from .wordsets import WordSet

#: Refuse dense-oracle workloads above this many tensor-entry updates.
DENSE_ORACLE_LIMIT = 5_000_000


def _dense_exp(delta: np.ndarray, N: int) -> list[np.ndarray]:
    """Levels of exp(delta): level n is delta^(x)n / n! as a dense tensor."""
    levels: list[np.ndarray] = [np.ones((), dtype=np.float64)]
    for n in range(1, N + 1):
        levels.append(np.multiply.outer(levels[-1], delta) / n)
    return levels


def _dense_mul(a: list[np.ndarray], b: list[np.ndarray], N: int) -> list[np.ndarray]:
    out = []
    for n in range(N + 1):
        acc = np.zeros((a[1].shape[0],) * n, dtype=np.float64)
        for m in range(n + 1):
            acc += np.multiply.outer(a[m], b[n - m])
        out.append(acc)
    return out


def dense_signature_oracle(paths, d: int, N: int) -> np.ndarray:
    """Truncated signature via explicit dense level-by-level tensor products.

    Returns an array of shape (B, sum_{n=1..N} d^n) in the canonical
    (length, code) column order.  Guarded to seconds-scale problem sizes.
    """
    batch = as_path_batch(paths, dtype=np.float64)
    if batch.d != d:
        raise ShapeError(f"paths have {batch.d} channels, expected {d}")
    if N < 1:
        raise DomainError(f"depth must be >= 1, got {N}")
    if d**N * max(batch.M, 1) > DENSE_ORACLE_LIMIT:
        raise DomainError(
            f"dense oracle refused: d={d}, N={N}, M={batch.M} exceeds the "
            f"size guardrail"
        )
    width = sum(d**n for n in range(1, N + 1))
    out = np.empty((batch.B, width), dtype=np.float64)
    for b in range(batch.B):
        sig = _dense_exp(np.zeros(d), N)  # identity
        for j in range(batch.M):
            sig = _dense_mul(sig, _dense_exp(batch.increments[b, j], N), N)
        out[b] = np.concatenate([sig[n].reshape(-1) for n in range(1, N + 1)])
    return out


def oracle_columns(ws: WordSet, oracle_values: np.ndarray) -> np.ndarray:
    """Select the oracle columns matching an arbitrary word set.

    oracle_values is the dense output of dense_signature_oracle over the
    same d at a depth >= the set's max length.
    """
    d = ws.d
    offsets = {1: 0}
    for n in range(2, ws.max_len + 1):
        offsets[n] = offsets[n - 1] + d ** (n - 1)
    cols = [offsets[int(n)] + int(c) for n, c in zip(ws.lengths, ws.codes)]
    return oracle_values[:, cols]


def shuffle_enumerate(u: Sequence[int], v: Sequence[int]) -> Counter:
    """Multiset of all interleavings of u and v preserving internal order."""
    u, v = tuple(u), tuple(v)
    if len(u) + len(v) > 8:
        raise DomainError("shuffle enumeration guarded to |u| + |v| <= 8")
    if not u:
        return Counter({v: 1})
    if not v:
        return Counter({u: 1})
    out: Counter = Counter()
    for w, mult in shuffle_enumerate(u[1:], v).items():
        out[(u[0],) + w] += mult
    for w, mult in shuffle_enumerate(u, v[1:]).items():
        out[(v[0],) + w] += mult
    return out


def finite_difference_grad(
    paths, ws: WordSet, upstream: np.ndarray, h: float = 1e-5
) -> np.ndarray:
    """Central-difference gradient of sum_w g_w S(w) per sample coordinate.

    The step for each coordinate is h scaled by max(1, |x|).  Double
    precision only; this is the oracle the analytic backward pass is
    checked against.
    """
    batch = as_path_batch(paths, dtype=np.float64)
    upstream = np.asarray(upstream, dtype=np.float64)
    if upstream.shape != (batch.B, len(ws)):
        raise ShapeError(
            f"upstream must have shape ({batch.B}, {len(ws)}), got {upstream.shape}"
        )

    def loss(samples: np.ndarray) -> np.ndarray:
        coeffs = signature_forward(samples, ws)
        return np.sum(coeffs.word_values * upstream, axis=1)

    grads = np.zeros_like(batch.samples)
    for j, i in itertools.product(range(batch.M + 1), range(batch.d)):
        step = h * np.maximum(1.0, np.abs(batch.samples[:, j, i]))
        plus = batch.samples.copy()
        plus[:, j, i] += step
        minus = batch.samples.copy()
        minus[:, j, i] -= step
        grads[:, j, i] = (loss(plus) - loss(minus)) / (2 * step)
    return grads
