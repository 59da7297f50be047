"""Words over a d-letter alphabet, stored as (length, base-d code) pairs.

A word (i_1, ..., i_n) with 0-based letters i_j < d is encoded as the
integer sum_j i_j * d**(n-j).  Within a fixed length this preserves
lexicographic order, and concatenation, prefix extraction and suffix
extraction become plain integer arithmetic:

    concat:  code(u o v) = code(u) * d**|v| + code(v)
    prefix:  code(w[:k])  = code(w) // d**(|w|-k)
    suffix:  code(w[-m:]) = code(w) %  d**m

Letters are 0-based everywhere inside the library; every user-facing
surface (word strings such as "1.2.2", error messages) is 1-based.
Codes must fit an unsigned 64-bit integer; longer words are rejected
rather than promoted to big integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    CapacityError,
    CorruptWordError,
    DomainError,
    InvalidLetterError,
    WordRangeError,
)

CODE_CAPACITY = 2**64

#: Word string for the empty word on CLI/config surfaces.
EMPTY_WORD_STRING = "e"


@dataclass(frozen=True)
class Alphabet:
    """A d-letter alphabet; letters are 0..d-1 internally, 1..d externally."""

    d: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise DomainError(f"alphabet size must be >= 1, got {self.d}")

    @property
    def bits_per_letter(self) -> int:
        """Bits used per letter when packing, at least 1 even for d == 1."""
        return max(math.ceil(math.log2(self.d)), 1) if self.d > 1 else 1

    @property
    def max_word_length(self) -> int:
        return max_word_length(self.d)


@dataclass(frozen=True)
class Word:
    """A word as (length, base-d code); letters materialize on demand."""

    length: int
    code: int

    def __post_init__(self) -> None:
        if self.length < 0 or self.code < 0:
            raise CorruptWordError(
                f"negative length or code: ({self.length}, {self.code})"
            )


@dataclass(frozen=True)
class PackedWord:
    """Letters packed into one 64-bit value, letter j at bits b*(j-1)."""

    bits: int
    bits_per_letter: int
    length: int


EMPTY_WORD = Word(0, 0)


def max_word_length(d: int) -> int:
    """Longest word length whose code fits below 2**64 (64 for d == 1)."""
    if d < 1:
        raise DomainError(f"alphabet size must be >= 1, got {d}")
    if d == 1:
        return 64  # code is always 0; the packing bound b*n <= 64 governs
    n, p = 0, 1
    while p * d <= CODE_CAPACITY:
        p *= d
        n += 1
    return n


def _check_letter(letter: int, d: int) -> None:
    if not 0 <= letter < d:
        raise InvalidLetterError(
            f"letter {letter + 1} outside alphabet 1..{d}"
        )


def encode_word(letters: Sequence[int], d: int) -> Word:
    """Encode 0-based letters as a Word; rejects codes beyond 64 bits."""
    n = len(letters)
    if n > max_word_length(d):
        raise CapacityError(
            f"word of length {n} over {d} letters exceeds 64-bit code capacity "
            f"(max length {max_word_length(d)})"
        )
    code = 0
    for letter in letters:
        _check_letter(int(letter), d)
        code = code * d + int(letter)
    return Word(n, code)


def decode_word(w: Word, d: int) -> tuple[int, ...]:
    """Inverse of encode_word; returns the 0-based letters of w."""
    if d >= 1 and w.code >= d**w.length:
        raise CorruptWordError(
            f"code {w.code} out of range for length {w.length} over {d} letters"
        )
    letters = []
    code = w.code
    for _ in range(w.length):
        code, letter = divmod(code, d)
        letters.append(letter)
    return tuple(reversed(letters))


def concat_code(u: Word, v: Word, d: int) -> Word:
    """Concatenated word u o v via code(u) * d**|v| + code(v)."""
    n = u.length + v.length
    if n > max_word_length(d):
        raise CapacityError(
            f"concatenation of lengths {u.length}+{v.length} exceeds capacity "
            f"for d={d} (max length {max_word_length(d)})"
        )
    return Word(n, u.code * d**v.length + v.code)


def prefix_code(w: Word, k: int, d: int) -> Word:
    """Prefix of length k, extracted as code(w) // d**(|w|-k)."""
    if not 0 <= k <= w.length:
        raise WordRangeError(f"prefix length {k} outside [0, {w.length}]")
    return Word(k, w.code // d ** (w.length - k))


def suffix_code(w: Word, m: int, d: int) -> Word:
    """Suffix of length m, extracted as code(w) mod d**m."""
    if not 0 <= m <= w.length:
        raise WordRangeError(f"suffix length {m} outside [0, {w.length}]")
    return Word(m, w.code % d**m)


def pack_letters(w: Word, b: int, d: int) -> PackedWord:
    """Pack the letters of w into a single 64-bit value, b bits each.

    Letter j lands at bits b*(j-1), so extraction is a shift and a mask.
    """
    if b < Alphabet(d).bits_per_letter:
        raise CapacityError(
            f"{b} bits per letter cannot hold letters of a {d}-letter alphabet"
        )
    if b * w.length > 64:
        raise CapacityError(
            f"{w.length} letters at {b} bits each exceed 64 bits"
        )
    bits = 0
    for j, letter in enumerate(decode_word(w, d)):
        bits |= letter << (b * j)
    return PackedWord(bits, b, w.length)


def unpack_letters(p: PackedWord) -> tuple[int, ...]:
    """Recover the 0-based letters of a PackedWord by shift and mask."""
    mask = (1 << p.bits_per_letter) - 1
    return tuple(
        (p.bits >> (p.bits_per_letter * j)) & mask for j in range(p.length)
    )


def word_to_string(w: Word, d: int) -> str:
    """1-based dotted word string, e.g. "1.2.2"; the empty word is "e"."""
    if w.length == 0:
        return EMPTY_WORD_STRING
    return ".".join(str(letter + 1) for letter in decode_word(w, d))


def word_from_string(s: str, d: int) -> Word:
    """Parse a 1-based dotted word string; inverse of word_to_string."""
    s = s.strip()
    if s == EMPTY_WORD_STRING or s == "":
        return EMPTY_WORD
    try:
        user_letters = [int(part) for part in s.split(".")]
    except ValueError as exc:
        raise InvalidLetterError(f"cannot parse word string {s!r}") from exc
    for letter in user_letters:
        if not 1 <= letter <= d:
            raise InvalidLetterError(
                f"letter {letter} in word {s!r} outside alphabet 1..{d}"
            )
    return encode_word([letter - 1 for letter in user_letters], d)
