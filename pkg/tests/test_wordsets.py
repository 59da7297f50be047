import itertools

import numpy as np
import pytest
from sympy import divisors, mobius

from sigkit.errors import CapacityError, DomainError, InvalidLetterError
from sigkit.words import decode_word, encode_word
from sigkit.wordsets import (
    EPSILON_INDEX,
    MISSING_INDEX,
    AnisotropyWeights,
    GraphSpec,
    WordSet,
    build_anisotropic,
    build_custom,
    build_graph,
    build_leadlag_sparse,
    build_lyndon,
    build_truncated,
    leadlag_generators,
    wordset_from_descriptor,
)


def all_words(d, max_len):
    """Independent enumeration of every word of length 1..max_len."""
    for n in range(1, max_len + 1):
        yield from itertools.product(range(d), repeat=n)


def as_letter_set(ws):
    return {decode_word(w, ws.d) for w in ws.words}


def witt(d, n):
    """Number of Lyndon words of length n over d letters."""
    return sum(mobius(m) * d ** (n // m) for m in divisors(n)) // n


def is_lyndon(word):
    """A word is Lyndon iff it is strictly smaller than all proper suffixes."""
    return all(word < word[k:] for k in range(1, len(word)))


def check_canonical(ws):
    lengths, codes = ws.lengths, ws.codes
    assert np.all(np.diff(lengths) >= 0)
    for n in np.unique(lengths):
        block = codes[lengths == n]
        assert np.all(np.diff(block.astype(object)) > 0)
    # prefix table: slot k holds a word of length k (or a sentinel)
    table = ws.prefix_table
    assert np.all(table[:, 0] == EPSILON_INDEX)
    for i in range(len(ws)):
        n = int(lengths[i])
        assert table[i, n] == i
        for k in range(1, n + 1):
            pos = table[i, k]
            if pos != MISSING_INDEX:
                assert int(lengths[pos]) == k
                expected = int(codes[i]) // ws.d ** (n - k)
                assert int(codes[pos]) == expected
    suffix = ws.suffix_table
    assert np.all(suffix[:, 0] == EPSILON_INDEX)
    for i in range(len(ws)):
        n = int(lengths[i])
        assert suffix[i, n] == i
        for m in range(1, n + 1):
            pos = suffix[i, m]
            if pos != MISSING_INDEX:
                assert int(codes[pos]) == int(codes[i]) % ws.d**m


class TestTruncated:
    def test_matches_enumeration(self):
        for d, N in [(1, 3), (2, 3), (3, 2), (4, 2)]:
            ws = build_truncated(d, N)
            assert as_letter_set(ws) == set(all_words(d, N))
            check_canonical(ws)
            assert ws.is_full_truncation

    def test_dimension_facts(self):
        assert len(build_truncated(6, 3)) == 258
        assert len(build_truncated(8, 6)) == 299_592

    def test_small(self):
        assert as_letter_set(build_truncated(2, 1)) == {(0,), (1,)}

    def test_validation(self):
        with pytest.raises(DomainError):
            build_truncated(2, 0)
        with pytest.raises(CapacityError):
            build_truncated(2, 65)


class TestAnisotropic:
    def test_example_weights_1_2(self):
        ws = build_anisotropic(AnisotropyWeights((1.0, 2.0), 3.0))
        expected = {(0,), (1,), (0, 0), (0, 1), (1, 0), (0, 0, 0)}
        assert as_letter_set(ws) == expected
        check_canonical(ws)

    def test_uniform_weights_reduce_to_truncation(self):
        for d, N in [(2, 3), (3, 2)]:
            ws = build_anisotropic(AnisotropyWeights((1.0,) * d, float(N)))
            assert ws == build_truncated(d, N)

    def test_heavy_channel_excluded(self):
        ws = build_anisotropic(AnisotropyWeights((1.0, 5.0), 1.0))
        assert as_letter_set(ws) == {(0,)}

    def test_integer_weights_exact(self):
        gamma, r = (1.0, 2.0, 3.0), 5.0
        ws = build_anisotropic(AnisotropyWeights(gamma, r))
        expected = {
            w for w in all_words(3, 5) if sum(gamma[i] for i in w) <= r
        }
        assert as_letter_set(ws) == expected

    def test_validation(self):
        with pytest.raises(DomainError):
            AnisotropyWeights((1.0, 0.0), 2.0)
        with pytest.raises(DomainError):
            AnisotropyWeights((1.0,), -1.0)


class TestGraph:
    def test_single_edge(self):
        ws = build_graph(GraphSpec(2, frozenset({(0, 1)})), 2)
        assert as_letter_set(ws) == {(0,), (1,), (0, 1)}

    def test_complete_graph_equals_truncation(self):
        edges = frozenset(itertools.product(range(3), repeat=2))
        assert build_graph(GraphSpec(3, edges), 3) == build_truncated(3, 3)

    def test_example_with_self_loops(self):
        ws = build_graph(GraphSpec(2, frozenset({(0, 0), (0, 1), (1, 1)})), 2)
        assert as_letter_set(ws) == {(0,), (1,), (0, 0), (0, 1), (1, 1)}

    def test_matches_enumeration(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            d = int(rng.integers(2, 5))
            N = int(rng.integers(1, 4))
            edges = frozenset(
                (i, j)
                for i, j in itertools.product(range(d), repeat=2)
                if rng.random() < 0.4
            )
            ws = build_graph(GraphSpec(d, edges), N)
            expected = {
                w
                for w in all_words(d, N)
                if len(w) == 1
                or all((w[k], w[k + 1]) in edges for k in range(len(w) - 1))
            }
            assert as_letter_set(ws) == expected
            check_canonical(ws)

    def test_prefix_closed(self):
        ws = build_graph(GraphSpec(3, frozenset({(0, 1), (1, 2), (2, 2)})), 4)
        members = as_letter_set(ws)
        for w in members:
            for k in range(1, len(w)):
                assert w[:k] in members

    def test_bad_edge(self):
        with pytest.raises(InvalidLetterError):
            GraphSpec(2, frozenset({(0, 2)}))


class TestLyndon:
    def test_small_example(self):
        ws = build_lyndon(2, 3)
        assert as_letter_set(ws) == {(0,), (1,), (0, 1), (0, 0, 1), (0, 1, 1)}

    def test_dimension_facts(self):
        assert len(build_lyndon(6, 3)) == 91
        assert len(build_lyndon(4, 6)) == 964

    def test_matches_bruteforce_filter(self):
        for d, N in [(2, 6), (3, 4), (4, 3)]:
            ws = build_lyndon(d, N)
            expected = {w for w in all_words(d, N) if is_lyndon(w)}
            assert as_letter_set(ws) == expected
            check_canonical(ws)

    def test_witt_formula_counts(self):
        for d in range(2, 11):
            for N in range(1, 9):
                if sum(witt(d, n) for n in range(1, N + 1)) > 20_000:
                    continue
                ws = build_lyndon(d, N)
                counts = np.bincount(ws.lengths, minlength=N + 1)
                for n in range(1, N + 1):
                    assert counts[n] == witt(d, n), (d, N, n)

    def test_one_letter_alphabet(self):
        assert as_letter_set(build_lyndon(1, 1)) == {(0,)}
        with pytest.raises(DomainError):
            build_lyndon(1, 2)


class TestLeadLagSparse:
    def bruteforce(self, d, N):
        gens = leadlag_generators(d)
        words = set()
        frontier = {()}
        while frontier:
            nxt = set()
            for base in frontier:
                for g in gens:
                    w = base + g
                    if len(w) <= N and w not in words:
                        words.add(w)
                        nxt.add(w)
            frontier = nxt
        return words

    def test_1d_examples(self):
        # lag channel is letter 0, lead channel letter 1
        ws = build_leadlag_sparse(1, 2)
        assert as_letter_set(ws) == {(1,), (1, 1), (0, 1), (1, 0)}
        assert as_letter_set(build_leadlag_sparse(1, 1)) == {(1,)}

    def test_matches_bruteforce(self):
        for d, N in [(1, 4), (2, 2), (2, 3), (3, 3)]:
            ws = build_leadlag_sparse(d, N)
            assert as_letter_set(ws) == self.bruteforce(d, N)
            check_canonical(ws)

    def test_2d_count(self):
        # generators for d=2: (L1), (L2), (l1,L1), (L1,l1), (l2,L2), (L2,l2);
        # products of total length <= 2 give 2 singles + 4 lead-lead pairs
        # + 4 generator pairs = 10 distinct words.
        assert len(build_leadlag_sparse(2, 2)) == 10
        assert len(self.bruteforce(2, 2)) == 10


class TestCustom:
    def test_dedup(self):
        ws = build_custom([(0,), (0, 1), (0, 1), (2,)], 3)
        assert len(ws) == 3
        check_canonical(ws)

    def test_missing_prefix_marked(self):
        ws = build_custom([(1, 0)], 2)
        assert ws.prefix_table[0, 1] == MISSING_INDEX
        assert ws.prefix_table[0, 2] == 0

    def test_equals_truncated(self):
        ws = build_custom(list(all_words(2, 2)), 2)
        assert ws == build_truncated(2, 2)
        assert ws.is_full_truncation

    def test_validation(self):
        with pytest.raises(DomainError):
            build_custom([], 2)
        with pytest.raises(InvalidLetterError):
            build_custom([(0, 2)], 2)
        with pytest.raises(DomainError):
            build_custom([()], 2)


class TestDescriptor:
    def test_truncated(self):
        ws = wordset_from_descriptor({"type": "truncated", "d": 2, "depth": 2})
        assert ws == build_truncated(2, 2)

    def test_custom_words_are_one_based(self):
        ws = wordset_from_descriptor({"type": "custom", "d": 2, "words": ["1.2", "2"]})
        assert as_letter_set(ws) == {(0, 1), (1,)}

    def test_graph_edges_are_one_based(self):
        ws = wordset_from_descriptor(
            {"type": "graph", "d": 2, "depth": 2, "edges": [[1, 2]]}
        )
        assert as_letter_set(ws) == {(0,), (1,), (0, 1)}

    def test_anisotropic(self):
        ws = wordset_from_descriptor(
            {"type": "anisotropic", "d": 2, "gamma": [1, 2], "r": 3}
        )
        assert len(ws) == 6

    def test_default_d(self):
        ws = wordset_from_descriptor({"type": "lyndon", "depth": 2}, default_d=3)
        assert ws.d == 3

    def test_errors(self):
        with pytest.raises(DomainError):
            wordset_from_descriptor({"type": "nope", "d": 2})
        with pytest.raises(DomainError):
            wordset_from_descriptor({"type": "truncated", "d": 2})
        with pytest.raises(DomainError):
            wordset_from_descriptor({"type": "truncated", "depth": 2})


class TestWordSetApi:
    def test_word_strings(self):
        ws = build_truncated(2, 2)
        assert ws.word_strings() == ["1", "2", "1.1", "1.2", "2.1", "2.2"]

    def test_width_with_empty(self):
        ws = build_truncated(2, 1)
        assert ws.width == 2
        assert ws.with_include_empty(True).width == 3

    def test_level_slice(self):
        ws = build_truncated(3, 2)
        assert ws.level_slice(1) == slice(0, 3)
        assert ws.level_slice(2) == slice(3, 12)

    def test_big_truncated_tables_fast(self):
        import time

        t0 = time.perf_counter()
        ws = build_truncated(8, 6)
        ws.prefix_table
        assert time.perf_counter() - t0 < 5.0
        # spot check a known row: word (0,...,0,1) of length 6 has code 1
        i = ws.level_slice(6).start + 1
        assert int(ws.codes[i]) == 1
        assert ws.prefix_table[i, 5] == ws.level_slice(5).start
