import math
from collections import Counter

import numpy as np
import pytest
from helpers import random_paths

from sigkit.errors import DomainError, ShapeError
from sigkit.testkit import (
    dense_signature_oracle,
    finite_difference_grad,
    oracle_columns,
    shuffle_enumerate,
)
from sigkit.wordsets import build_custom, build_truncated


class TestDenseOracle:
    def test_one_segment_closed_form(self):
        delta = np.array([0.5, -1.5])
        paths = np.stack([np.zeros((1, 2)), delta[None]], axis=1)
        out = dense_signature_oracle(paths, 2, 3)
        # level 1
        np.testing.assert_allclose(out[0, :2], delta)
        # level 2: outer(delta, delta) / 2 flattened
        np.testing.assert_allclose(
            out[0, 2:6], np.outer(delta, delta).ravel() / 2
        )
        # level 3 entry (1,1,1): delta_0^3 / 6
        assert out[0, 6] == pytest.approx(delta[0] ** 3 / 6)

    def test_constant_path_identity(self):
        out = dense_signature_oracle(np.zeros((2, 5, 2)), 2, 3)
        assert np.all(out == 0.0)

    def test_l_path(self):
        paths = np.array([[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]])
        out = dense_signature_oracle(paths, 2, 2)
        np.testing.assert_allclose(out[0], [1, 1, 0.5, 1, 0, 0.5], atol=1e-15)

    def test_guardrail(self):
        with pytest.raises(DomainError):
            dense_signature_oracle(np.zeros((1, 1001, 8)), 8, 6)

    def test_column_selection(self):
        paths = np.array([[[0.0, 0.0], [1.0, 2.0]]])
        dense = dense_signature_oracle(paths, 2, 2)
        ws = build_custom([(1, 0), (0,)], 2)
        cols = oracle_columns(ws, dense)
        # canonical order: (0,) then (1,0)
        np.testing.assert_allclose(cols[0], [1.0, 1.0])


class TestShuffleEnumerate:
    def test_examples(self):
        assert shuffle_enumerate((0,), (1,)) == Counter({(0, 1): 1, (1, 0): 1})
        assert shuffle_enumerate((), (1, 0)) == Counter({(1, 0): 1})
        assert shuffle_enumerate((0,), (0,)) == Counter({(0, 0): 2})

    def test_counts_are_binomial(self):
        u, v = (0, 1), (2, 3, 4)
        result = shuffle_enumerate(u, v)
        assert sum(result.values()) == math.comb(5, 2)

    def test_guardrail(self):
        with pytest.raises(DomainError):
            shuffle_enumerate((0,) * 5, (1,) * 4)


class TestFiniteDifference:
    def test_zero_upstream(self):
        ws = build_truncated(2, 2)
        out = finite_difference_grad(np.zeros((1, 3, 2)), ws, np.zeros((1, len(ws))))
        assert np.all(out == 0.0)

    def test_level_one_closed_form(self):
        rng = np.random.default_rng(80)
        paths = random_paths(rng, 2, 4, 2)
        ws = build_truncated(2, 1)
        g = rng.normal(size=(2, 2))
        out = finite_difference_grad(paths, ws, g)
        np.testing.assert_allclose(out[:, 0], -g, rtol=1e-7, atol=1e-9)
        np.testing.assert_allclose(out[:, -1], g, rtol=1e-7, atol=1e-9)

    def test_shape_check(self):
        ws = build_truncated(2, 2)
        with pytest.raises(ShapeError):
            finite_difference_grad(np.zeros((1, 3, 2)), ws, np.zeros((2, 3)))
