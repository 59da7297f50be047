import numpy as np
import pytest
from helpers import random_paths
from sklearn.base import clone
from sklearn.linear_model import Ridge
from sklearn.pipeline import Pipeline

from sigkit.errors import ShapeError
from sigkit.estimators import (
    LogSignatureFeatures,
    SignatureFeatures,
    WindowedSignatureFeatures,
)
from sigkit.logsig import logsignature_forward
from sigkit.sigcore import signature_forward
from sigkit.transforms import lead_lag
from sigkit.wordsets import build_leadlag_sparse, build_truncated


class TestSignatureFeatures:
    def test_matches_functional_api(self):
        rng = np.random.default_rng(90)
        X = random_paths(rng, 4, 10, 2)
        est = SignatureFeatures(depth=3).fit(X)
        np.testing.assert_array_equal(
            est.transform(X), signature_forward(X, build_truncated(2, 3)).values
        )

    def test_feature_names(self):
        X = np.zeros((2, 3, 2))
        est = SignatureFeatures(depth=2).fit(X)
        assert list(est.get_feature_names_out()) == [
            "1", "2", "1.1", "1.2", "2.1", "2.2",
        ]

    def test_include_empty(self):
        X = np.zeros((2, 3, 2))
        est = SignatureFeatures(depth=1, include_empty=True).fit(X)
        out = est.transform(X)
        assert out.shape == (2, 3)
        assert np.all(out[:, 0] == 1.0)
        assert est.get_feature_names_out()[0] == "e"

    def test_get_params_clone(self):
        est = SignatureFeatures(word_set="anisotropic", gamma=[1, 2], r=3.0)
        cloned = clone(est)
        assert cloned.get_params()["gamma"] == [1, 2]

    def test_anisotropic(self):
        X = np.zeros((1, 4, 2))
        est = SignatureFeatures(word_set="anisotropic", gamma=[1, 2], r=3).fit(X)
        assert est.transform(X).shape == (1, 6)

    def test_custom_words_one_based(self):
        X = np.zeros((1, 4, 2))
        est = SignatureFeatures(word_set="custom", words=["2.1", "1"]).fit(X)
        assert list(est.get_feature_names_out()) == ["1", "2.1"]

    def test_lead_lag_flag(self):
        rng = np.random.default_rng(91)
        X = random_paths(rng, 3, 6, 2)
        est = SignatureFeatures(depth=2, lead_lag=True).fit(X)
        direct = signature_forward(lead_lag(X), build_truncated(4, 2)).values
        np.testing.assert_array_equal(est.transform(X), direct)

    def test_leadlag_sparse_wordset(self):
        rng = np.random.default_rng(92)
        X = random_paths(rng, 2, 5, 2)
        est = SignatureFeatures(word_set="leadlag_sparse", depth=2, lead_lag=True).fit(X)
        assert est.wordset_ == build_leadlag_sparse(2, 2)
        assert est.transform(X).shape == (2, 10)

    def test_channel_mismatch_raises(self):
        est = SignatureFeatures(depth=2).fit(np.zeros((1, 3, 2)))
        with pytest.raises(ShapeError):
            est.transform(np.zeros((1, 3, 3)))

    def test_rejects_2d_input(self):
        with pytest.raises(ShapeError):
            SignatureFeatures().fit(np.zeros((4, 10)))

    def test_pipeline_smoke(self):
        rng = np.random.default_rng(93)
        X = random_paths(rng, 20, 15, 2)
        y = X[:, -1, 0] - X[:, 0, 0]
        pipe = Pipeline(
            [("sig", SignatureFeatures(depth=2)), ("reg", Ridge(alpha=1e-6))]
        )
        pipe.fit(X, y)
        assert pipe.score(X, y) > 0.99


class TestLogSignatureFeatures:
    def test_matches_functional_api(self):
        rng = np.random.default_rng(94)
        X = random_paths(rng, 3, 8, 2)
        est = LogSignatureFeatures(depth=3).fit(X)
        np.testing.assert_array_equal(
            est.transform(X), logsignature_forward(X, 2, 3).values
        )

    def test_feature_names_are_lyndon(self):
        est = LogSignatureFeatures(depth=3).fit(np.zeros((1, 3, 2)))
        assert list(est.get_feature_names_out()) == ["1", "2", "1.2", "1.1.2", "1.2.2"]


class TestWindowedSignatureFeatures:
    def test_flattened_output(self):
        rng = np.random.default_rng(95)
        X = random_paths(rng, 2, 10, 2)
        est = WindowedSignatureFeatures(windows=[(0, 5), (5, 10)], depth=2).fit(X)
        out = est.transform(X)
        assert out.shape == (2, 12)
        ws = build_truncated(2, 2)
        np.testing.assert_array_equal(
            out[:, :6], signature_forward(X[:, :6], ws).values
        )
        np.testing.assert_array_equal(
            out[:, 6:], signature_forward(X[:, 5:], ws).values
        )

    def test_feature_names_carry_windows(self):
        est = WindowedSignatureFeatures(windows=[(0, 2)], depth=1).fit(
            np.zeros((1, 3, 2))
        )
        assert list(est.get_feature_names_out()) == ["0:2|1", "0:2|2"]

    def test_clone_keeps_windows(self):
        est = WindowedSignatureFeatures(windows=[(0, 3)], depth=2)
        assert clone(est).get_params()["windows"] == [(0, 3)]
