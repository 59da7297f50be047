"""Construction and canonical ordering of projection word sets.

A WordSet is the index set I of signature coefficients to emit.  Words are
kept in the canonical (length ascending, code ascending) order, which fixes
the column layout of every coefficient batch computed against the set.
Builders cover plain truncation, anisotropic (weighted-degree) truncation,
graph-induced sets, Lyndon words, the sparse lead-lag set, and arbitrary
custom word lists.  Sets need not be prefix-closed: kernels compute missing
prefixes as scratch values and simply do not emit them.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DomainError, InvalidLetterError
from .words import (
    Word,
    decode_word,
    encode_word,
    max_word_length,
    word_from_string,
    word_to_string,
)

#: prefix_table / suffix_table entry meaning "the empty word".
EPSILON_INDEX = -1
#: prefix_table / suffix_table entry meaning "word not in the set".
MISSING_INDEX = -2

#: Absolute tolerance on weighted degrees when admitting anisotropic words.
ANISO_TOL = 1e-12


@dataclass(frozen=True)
class AnisotropyWeights:
    """Per-channel weights gamma and cutoff r for weighted-degree truncation."""

    gamma: tuple[float, ...]
    r: float

    def __post_init__(self) -> None:
        if len(self.gamma) < 1:
            raise DomainError("anisotropy weights need at least one channel")
        if any(g <= 0 for g in self.gamma):
            raise DomainError(f"anisotropy weights must be positive, got {self.gamma}")
        if self.r <= 0:
            raise DomainError(f"anisotropy cutoff must be positive, got {self.r}")

    @property
    def d(self) -> int:
        return len(self.gamma)


@dataclass(frozen=True)
class GraphSpec:
    """Directed letter-adjacency graph: edge (i, j) allows i followed by j.

    Letters are 0-based here, matching the internal alphabet convention.
    Self-loops are allowed (a pure DAG could never repeat a letter, which
    plain truncation does all the time).
    """

    d: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.d < 1:
            raise DomainError(f"node count must be >= 1, got {self.d}")
        for i, j in self.edges:
            if not (0 <= i < self.d and 0 <= j < self.d):
                raise InvalidLetterError(
                    f"edge ({i + 1}, {j + 1}) outside alphabet 1..{self.d}"
                )


class WordSet:
    """Canonically ordered words plus the index tables kernels consume.

    Do not call the constructor with unsorted or duplicated words; use the
    build_* functions or from_descriptor, which canonicalize their input.
    """

    def __init__(
        self,
        d: int,
        lengths: np.ndarray,
        codes: np.ndarray,
        kind: str = "custom",
        include_empty: bool = False,
        meta: dict | None = None,
    ):
        if d < 1:
            raise DomainError(f"alphabet size must be >= 1, got {d}")
        self.d = int(d)
        self.lengths = np.ascontiguousarray(lengths, dtype=np.int64)
        self.codes = np.ascontiguousarray(codes, dtype=np.uint64)
        self.kind = kind
        self.include_empty = bool(include_empty)
        self.meta = dict(meta or {})
        if self.lengths.shape != self.codes.shape or self.lengths.ndim != 1:
            raise DomainError("lengths and codes must be 1-d arrays of equal size")
        if self.lengths.size and int(self.lengths.max()) > max_word_length(self.d):
            raise CapacityError(
                f"word length {int(self.lengths.max())} exceeds 64-bit capacity "
                f"for d={self.d} (max {max_word_length(self.d)})"
            )

    # -- basic introspection ------------------------------------------------

    def __len__(self) -> int:
        return int(self.lengths.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WordSet):
            return NotImplemented
        return (
            self.d == other.d
            and np.array_equal(self.lengths, other.lengths)
            and np.array_equal(self.codes, other.codes)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"WordSet(kind={self.kind!r}, d={self.d}, words={len(self)}, "
            f"max_len={self.max_len})"
        )

    @property
    def max_len(self) -> int:
        return int(self.lengths.max()) if len(self) else 0

    @property
    def width(self) -> int:
        """Number of output columns, including the epsilon column if exposed."""
        return len(self) + (1 if self.include_empty else 0)

    @functools.cached_property
    def words(self) -> tuple[Word, ...]:
        return tuple(Word(int(n), int(c)) for n, c in zip(self.lengths, self.codes))

    def word_at(self, i: int) -> Word:
        return Word(int(self.lengths[i]), int(self.codes[i]))

    def word_strings(self) -> list[str]:
        return [word_to_string(w, self.d) for w in self.words]

    @functools.cached_property
    def global_index(self) -> dict[tuple[int, int], int]:
        """Map (length, code) -> position in the canonical order."""
        return {
            (int(n), int(c)): i
            for i, (n, c) in enumerate(zip(self.lengths, self.codes))
        }

    def index_of(self, w: Word) -> int:
        """Position of w in the set, or MISSING_INDEX if absent."""
        if w.length == 0:
            return EPSILON_INDEX
        return self.global_index.get((w.length, w.code), MISSING_INDEX)

    def with_include_empty(self, flag: bool) -> "WordSet":
        if flag == self.include_empty:
            return self
        return WordSet(self.d, self.lengths, self.codes, self.kind, flag, self.meta)

    # -- kernel-facing tables -------------------------------------------------

    @functools.cached_property
    def letters(self) -> np.ndarray:
        """0-based letters per word, shape (n_words, max_len), zero padded."""
        out = np.zeros((len(self), self.max_len), dtype=np.int64)
        d = np.uint64(self.d)
        start = 0
        for n, count in self._level_counts():
            block = self.codes[start : start + count]
            for j in range(n):
                p = np.uint64(self.d ** (n - 1 - j))
                out[start : start + count, j] = ((block // p) % d).astype(np.int64)
            start += count
        return out

    @functools.cached_property
    def prefix_table(self) -> np.ndarray:
        """Positions of each word's prefixes, shape (n_words, max_len + 1).

        Entry [i, k] is the position of the length-k prefix of word i:
        EPSILON_INDEX at k = 0, MISSING_INDEX when the prefix is not in the
        set (or beyond the word's length), and [i, |w_i|] == i.
        """
        return self._factor_table(suffix=False)

    @functools.cached_property
    def suffix_table(self) -> np.ndarray:
        """Positions of each word's suffixes, same layout as prefix_table."""
        return self._factor_table(suffix=True)

    def _factor_table(self, suffix: bool) -> np.ndarray:
        table = np.full((len(self), self.max_len + 1), MISSING_INDEX, dtype=np.int64)
        table[:, 0] = EPSILON_INDEX
        if self.is_full_truncation:
            # Positions are level offset + code, computable without lookups.
            start = 0
            for n, count in self._level_counts():
                block = self.codes[start : start + count]
                for k in range(1, n + 1):
                    p = np.uint64(self.d ** (n - k))
                    sub = (block // p) if not suffix else (block % np.uint64(self.d**k))
                    table[start : start + count, k] = self._level_start(k) + sub.astype(
                        np.int64
                    )
                start += count
            return table
        index = self.global_index
        for i in range(len(self)):
            n = int(self.lengths[i])
            code = int(self.codes[i])
            for k in range(1, n + 1):
                sub = code // self.d ** (n - k) if not suffix else code % self.d**k
                table[i, k] = index.get((k, sub), MISSING_INDEX)
        return table

    def _level_counts(self) -> list[tuple[int, int]]:
        """(length, count) pairs in ascending length order."""
        if not len(self):
            return []
        counts = np.bincount(self.lengths, minlength=self.max_len + 1)
        return [(n, int(c)) for n, c in enumerate(counts) if n >= 1 and c > 0]

    def _level_start(self, n: int) -> int:
        counts = np.bincount(self.lengths, minlength=self.max_len + 1)
        return int(counts[:n].sum())

    def level_slice(self, n: int) -> slice:
        """Column slice of the length-n words (canonical order is graded)."""
        start = self._level_start(n)
        if n > self.max_len:
            return slice(start, start)
        counts = np.bincount(self.lengths, minlength=self.max_len + 1)
        return slice(start, start + int(counts[n]))

    @functools.cached_property
    def is_full_truncation(self) -> bool:
        """True when the set is exactly all words of length 1..max_len."""
        if not len(self):
            return False
        counts = np.bincount(self.lengths, minlength=self.max_len + 1)
        expected = [self.d**n for n in range(1, self.max_len + 1)]
        return counts[0] == 0 and list(counts[1:]) == expected


def _canonical_arrays(words: Iterable[tuple[int, int]]) -> tuple[np.ndarray, np.ndarray]:
    """Sort unique (length, code) pairs into the canonical order."""
    unique = sorted(set(words))
    lengths = np.array([n for n, _ in unique], dtype=np.int64)
    codes = np.array([c for _, c in unique], dtype=np.uint64)
    return lengths, codes


def _encode_tuples(letter_tuples: Iterable[Sequence[int]], d: int) -> list[tuple[int, int]]:
    out = []
    for letters in letter_tuples:
        w = encode_word(letters, d)
        out.append((w.length, w.code))
    return out


# -- builders -----------------------------------------------------------------


def build_truncated(d: int, depth: int, include_empty: bool = False) -> WordSet:
    """All words of length 1..depth over d letters."""
    if d < 1 or depth < 1:
        raise DomainError(f"need d >= 1 and depth >= 1, got d={d}, depth={depth}")
    if depth > max_word_length(d):
        raise CapacityError(
            f"depth {depth} exceeds 64-bit code capacity for d={d} "
            f"(max {max_word_length(d)})"
        )
    lengths = np.concatenate(
        [np.full(d**n, n, dtype=np.int64) for n in range(1, depth + 1)]
    )
    codes = np.concatenate(
        [np.arange(d**n, dtype=np.uint64) for n in range(1, depth + 1)]
    )
    return WordSet(d, lengths, codes, "truncated", include_empty, {"depth": depth})


def build_anisotropic(weights: AnisotropyWeights, include_empty: bool = False) -> WordSet:
    """Words whose weighted degree sum_j gamma[i_j] stays within the cutoff."""
    d = weights.d
    cutoff = weights.r + ANISO_TOL
    longest = int(math.floor(cutoff / min(weights.gamma)))
    if longest > max_word_length(d):
        raise CapacityError(
            f"cutoff {weights.r} admits words of length {longest}, beyond the "
            f"64-bit capacity for d={d} (max {max_word_length(d)})"
        )
    found: list[tuple[int, int]] = []
    stack: list[tuple[int, int, float]] = [(0, 0, 0.0)]  # (length, code, degree)
    while stack:
        n, code, degree = stack.pop()
        for letter in range(d):
            deg = degree + weights.gamma[letter]
            if deg <= cutoff:
                child = (n + 1, code * d + letter)
                found.append(child)
                stack.append((*child, deg))
    if not found:
        raise DomainError(
            f"no word is admissible at cutoff r={weights.r} with gamma={weights.gamma}"
        )
    lengths, codes = _canonical_arrays(found)
    return WordSet(
        d,
        lengths,
        codes,
        "anisotropic",
        include_empty,
        {"gamma": tuple(weights.gamma), "r": weights.r},
    )


def build_graph(g: GraphSpec, depth: int, include_empty: bool = False) -> WordSet:
    """Words of length <= depth whose adjacent letter pairs are graph edges.

    Every single-letter word is included regardless of the edge set.
    """
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    if depth > max_word_length(g.d):
        raise CapacityError(
            f"depth {depth} exceeds 64-bit code capacity for d={g.d}"
        )
    successors: dict[int, list[int]] = {i: [] for i in range(g.d)}
    for i, j in sorted(g.edges):
        successors[i].append(j)
    found: list[tuple[int, int]] = []
    stack = [(1, letter, letter) for letter in range(g.d)]  # (length, code, last)
    while stack:
        n, code, last = stack.pop()
        found.append((n, code))
        if n < depth:
            for nxt in successors[last]:
                stack.append((n + 1, code * g.d + nxt, nxt))
    lengths, codes = _canonical_arrays(found)
    return WordSet(
        g.d,
        lengths,
        codes,
        "graph",
        include_empty,
        {"edges": tuple(sorted(g.edges)), "depth": depth},
    )


def _duval_lyndon(d: int, depth: int) -> list[tuple[int, ...]]:
    """Duval's algorithm: Lyndon words of length <= depth, lexicographic."""
    out: list[tuple[int, ...]] = []
    w = [-1]
    while w:
        w[-1] += 1
        out.append(tuple(w))
        m = len(w)
        while len(w) < depth:
            w.append(w[len(w) - m])
        while w and w[-1] == d - 1:
            w.pop()
    return out


def build_lyndon(d: int, depth: int, include_empty: bool = False) -> WordSet:
    """Lyndon words of length <= depth, the log-signature index set."""
    if depth < 1:
        raise DomainError(f"depth must be >= 1, got {depth}")
    if d < 1:
        raise DomainError(f"alphabet size must be >= 1, got {d}")
    if d == 1 and depth > 1:
        raise DomainError(
            "a one-letter alphabet has no Lyndon words beyond length 1; "
            "use depth=1"
        )
    if depth > max_word_length(d):
        raise CapacityError(f"depth {depth} exceeds 64-bit capacity for d={d}")
    lengths, codes = _canonical_arrays(_encode_tuples(_duval_lyndon(d, depth), d))
    return WordSet(d, lengths, codes, "lyndon", include_empty, {"depth": depth})


def leadlag_generators(d: int) -> list[tuple[int, ...]]:
    """Nonempty generator words of the sparse lead-lag set, 0-based letters.

    Over the 2d-letter lead-lag alphabet (lag channels 0..d-1, lead channels
    d..2d-1): every single lead letter, plus the within-channel pairs
    (lag_i, lead_i) and (lead_i, lag_i).
    """
    singles = [(d + i,) for i in range(d)]
    pairs = [(i, d + i) for i in range(d)] + [(d + i, i) for i in range(d)]
    return singles + pairs


def build_leadlag_sparse(d: int, depth: int, include_empty: bool = False) -> WordSet:
    """Concatenations of sparse lead-lag generators, total length <= depth.

    d is the dimension of the underlying path; the resulting word set lives
    over the 2d-letter lead-lag alphabet.
    """
    if d < 1 or depth < 1:
        raise DomainError(f"need d >= 1 and depth >= 1, got d={d}, depth={depth}")
    dd = 2 * d
    if depth > max_word_length(dd):
        raise CapacityError(f"depth {depth} exceeds 64-bit capacity for d={dd}")
    gens = leadlag_generators(d)
    seen: set[tuple[int, ...]] = {()}
    frontier: list[tuple[int, ...]] = [()]
    while frontier:
        base = frontier.pop()
        for gen in gens:
            word = base + gen
            if len(word) <= depth and word not in seen:
                seen.add(word)
                frontier.append(word)
    seen.discard(())
    lengths, codes = _canonical_arrays(_encode_tuples(seen, dd))
    return WordSet(
        dd, lengths, codes, "leadlag_sparse", include_empty, {"depth": depth, "base_d": d}
    )


def build_custom(
    letter_words: Iterable[Sequence[int]], d: int, include_empty: bool = False
) -> WordSet:
    """Deduplicated, canonically ordered set from explicit 0-based words.

    The set need not be prefix-closed; absent prefixes are marked
    MISSING_INDEX in the prefix table and computed internally but not
    emitted by the kernels.
    """
    pairs = _encode_tuples(letter_words, d)
    if not pairs:
        raise DomainError("custom word set must contain at least one word")
    if any(n == 0 for n, _ in pairs):
        raise DomainError("custom word sets may not contain the empty word")
    lengths, codes = _canonical_arrays(pairs)
    return WordSet(d, lengths, codes, "custom", include_empty)


# -- JSON descriptor ----------------------------------------------------------

DESCRIPTOR_TYPES = (
    "truncated",
    "anisotropic",
    "graph",
    "lyndon",
    "leadlag_sparse",
    "custom",
)


def wordset_from_descriptor(desc: dict, default_d: int | None = None) -> WordSet:
    """Build a WordSet from the JSON descriptor used by the CLI and config.

    Descriptor fields are user facing: letters in "words" strings and
    "edges" pairs are 1-based.  For "leadlag_sparse" the field "d" is the
    underlying path dimension, before channel doubling.
    """
    if not isinstance(desc, dict):
        raise DomainError(f"word-set descriptor must be an object, got {type(desc)}")
    kind = desc.get("type")
    if kind not in DESCRIPTOR_TYPES:
        raise DomainError(
            f"unknown word-set type {kind!r}; expected one of {DESCRIPTOR_TYPES}"
        )
    d = desc.get("d", default_d)
    if d is None:
        raise DomainError("word-set descriptor needs a channel count 'd'")
    d = int(d)
    include_empty = bool(desc.get("include_empty", False))

    def need(key: str):
        if key not in desc:
            raise DomainError(f"word-set type {kind!r} requires field {key!r}")
        return desc[key]

    if kind == "truncated":
        return build_truncated(d, int(need("depth")), include_empty)
    if kind == "anisotropic":
        gamma = tuple(float(g) for g in need("gamma"))
        if len(gamma) != d:
            raise DomainError(
                f"gamma has {len(gamma)} entries but d={d}"
            )
        return build_anisotropic(
            AnisotropyWeights(gamma, float(need("r"))), include_empty
        )
    if kind == "graph":
        edges = frozenset((int(i) - 1, int(j) - 1) for i, j in need("edges"))
        return build_graph(GraphSpec(d, edges), int(need("depth")), include_empty)
    if kind == "lyndon":
        return build_lyndon(d, int(need("depth")), include_empty)
    if kind == "leadlag_sparse":
        return build_leadlag_sparse(d, int(need("depth")), include_empty)
    # custom
    letter_words = [decode_word(word_from_string(s, d), d) for s in need("words")]
    return build_custom(letter_words, d, include_empty)
