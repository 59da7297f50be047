"""Log-signatures in the Lyndon-indexed tensor-coefficient basis.

The log-signature is the tensor logarithm of the signature; restricted to
Lyndon words it is a minimal coordinate system for the underlying Lie
element.  Coefficients are reported in the expanded word basis at Lyndon
indices; there is no conversion to bracket coordinates.

The forward pass exploits that in log(1 + x) = sum_k (-1)^(k+1) x^k / k
every k >= 2 term at a length-N word only touches factors of length
<= N-1: it computes all words up to level N-1 but only the Lyndon words
at level N, which is where the bulk of a full truncation lives.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from .backward import GradBatch, signature_backward
from .errors import DomainError, ShapeError
from .sigcore import (
    CoefficientBatch,
    _require_truncated,
    _tensor_mul_full,
    _to_full,
    as_path_batch,
    signature_forward,
)
from .wordsets import WordSet, build_lyndon, build_truncated


def _log_coef(k: int) -> float:
    return (-1.0) ** (k + 1) / k


class LogCoefficientBatch(CoefficientBatch):
    """Log-signature coefficients over a Lyndon word set."""


def tensor_log(a: CoefficientBatch) -> CoefficientBatch:
    """Tensor logarithm of a truncated signature batch, coefficient-wise.

    Evaluates log(1 + x) = sum_{k=1..N} (-1)^(k+1) x^k / k with Horner
    nesting over levels, where x is the input minus the empty-word unit.
    """
    N = _require_truncated(a.wordset)
    d = a.wordset.d
    x = _to_full(a)
    x[:, 0] = 0.0
    P = np.zeros_like(x)
    P[:, 0] = _log_coef(N)
    for k in range(N - 1, 0, -1):
        P = _tensor_mul_full(x, P, d, N)
        P[:, 0] += _log_coef(k)
    out = _tensor_mul_full(x, P, d, N)
    return CoefficientBatch(a.wordset.with_include_empty(False), out[:, 1:])


def tensor_exp(a: CoefficientBatch) -> CoefficientBatch:
    """Truncated tensor exponential, the inverse of tensor_log on its image."""
    N = _require_truncated(a.wordset)
    d = a.wordset.d
    x = _to_full(a)
    x[:, 0] = 0.0
    P = np.zeros_like(x)
    P[:, 0] = 1.0
    for k in range(N, 0, -1):
        P = _tensor_mul_full(x, P, d, N) / k
        P[:, 0] += 1.0
    return CoefficientBatch(a.wordset.with_include_empty(False), P[:, 1:])


def _compositions(word: tuple[int, ...]):
    """All splits of word into ordered nonempty contiguous factors."""
    n = len(word)
    for cuts in itertools.chain.from_iterable(
        itertools.combinations(range(1, n), r) for r in range(n)
    ):
        bounds = (0,) + cuts + (n,)
        yield tuple(word[bounds[i] : bounds[i + 1]] for i in range(len(bounds) - 1))


@functools.lru_cache(maxsize=32)
def _lyndon_projection(d: int, N: int):
    """Word set and log-series terms for the Lyndon projection at depth N.

    Returns (compute_ws, lyndon_ws, terms) where terms[i] lists
    (coefficient, factor column tuple) pairs: the log coefficient at
    lyndon_ws.words[i] is sum of coefficient * prod(sig[col] for cols).
    """
    lyndon_ws = build_lyndon(d, min(N, 1) if d == 1 else N)
    compute_words: set[tuple[int, int]] = set()
    if N >= 2:
        lower = build_truncated(d, N - 1)
        compute_words.update(
            (int(n), int(c)) for n, c in zip(lower.lengths, lower.codes)
        )
    compute_words.update(
        (int(n), int(c)) for n, c in zip(lyndon_ws.lengths, lyndon_ws.codes)
    )
    pairs = sorted(compute_words)
    compute_ws = WordSet(
        d,
        np.array([n for n, _ in pairs], dtype=np.int64),
        np.array([c for _, c in pairs], dtype=np.uint64),
        kind="custom",
        meta={"role": "logsig-internal", "depth": N},
    )
    letters = {
        i: tuple(int(x) for x in compute_ws.letters[i, : int(compute_ws.lengths[i])])
        for i in range(len(compute_ws))
    }
    letters_to_col = {v: k for k, v in letters.items()}
    terms: list[list[tuple[float, tuple[int, ...]]]] = []
    for wi in range(len(lyndon_ws)):
        n = int(lyndon_ws.lengths[wi])
        word = tuple(int(x) for x in lyndon_ws.letters[wi, :n])
        entries = []
        for factors in _compositions(word):
            cols = tuple(letters_to_col[f] for f in factors)
            entries.append((_log_coef(len(factors)), cols))
        terms.append(entries)
    return compute_ws, lyndon_ws, terms


def logsignature_forward(
    paths, d: int, N: int, threads: int | None = None
) -> LogCoefficientBatch:
    """Log-signature coefficients at the Lyndon words of length <= N."""
    if N < 1:
        raise DomainError(f"depth must be >= 1, got {N}")
    paths = as_path_batch(paths)
    if paths.d != d:
        raise ShapeError(f"paths have {paths.d} channels, expected {d}")
    compute_ws, lyndon_ws, terms = _lyndon_projection(d, N)
    sig = signature_forward(paths, compute_ws, threads=threads).values
    out = np.zeros((paths.B, len(lyndon_ws)), dtype=sig.dtype)
    for wi, entries in enumerate(terms):
        acc = out[:, wi]
        for coef, cols in entries:
            prod = sig[:, cols[0]].copy()
            for col in cols[1:]:
                prod *= sig[:, col]
            acc += coef * prod
    return LogCoefficientBatch(lyndon_ws, out)


def logsignature_backward(
    paths, d: int, N: int, grad_out: np.ndarray, threads: int | None = None
) -> GradBatch:
    """Path gradients of a weighted sum of Lyndon log-signature coefficients.

    Chains the polynomial Jacobian of the truncated log series with the
    signature backward pass over the reduced word set.
    """
    if N < 1:
        raise DomainError(f"depth must be >= 1, got {N}")
    paths = as_path_batch(paths, dtype=np.float64)
    if paths.d != d:
        raise ShapeError(f"paths have {paths.d} channels, expected {d}")
    compute_ws, lyndon_ws, terms = _lyndon_projection(d, N)
    grad_out = np.asarray(grad_out, dtype=np.float64)
    if grad_out.shape != (paths.B, len(lyndon_ws)):
        raise ShapeError(
            f"grad_out must have shape ({paths.B}, {len(lyndon_ws)}), "
            f"got {grad_out.shape}"
        )
    sig = signature_forward(paths, compute_ws, threads=threads).values
    upstream = np.zeros((paths.B, len(compute_ws)), dtype=np.float64)
    for wi, entries in enumerate(terms):
        g = grad_out[:, wi]
        if not np.any(g):
            continue
        for coef, cols in entries:
            k = len(cols)
            vals = sig[:, list(cols)]
            prefix = np.ones((paths.B, k))
            for i in range(1, k):
                prefix[:, i] = prefix[:, i - 1] * vals[:, i - 1]
            suffix = np.ones((paths.B, k))
            for i in range(k - 2, -1, -1):
                suffix[:, i] = suffix[:, i + 1] * vals[:, i + 1]
            for i, col in enumerate(cols):
                upstream[:, col] += g * coef * prefix[:, i] * suffix[:, i]
    inner = signature_backward(paths, compute_ws, upstream, threads=threads)
    return GradBatch(
        upstream=grad_out,
        increment_grads=inner.increment_grads,
        path_grads=inner.path_grads,
    )
