"""Scikit-learn style transformers over the signature kernels.

These wrap the functional API as stateless feature extractors so the
library composes with sklearn pipelines, grid search and friends.  Input
is a 3-d array (n_paths, n_samples, n_channels); output is a 2-d feature
matrix whose columns follow the word set's canonical order.  Word-set
parameters mirror the JSON descriptor: letters in `words` strings and
`edges` pairs are 1-based.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_paths, check_window_pairs
from .errors import ShapeError
from .logsig import logsignature_forward
from .sigcore import WindowSpec, signature_forward, signature_windows
from .transforms import lead_lag
from .wordsets import build_lyndon, wordset_from_descriptor


class _PathTransformer(TransformerMixin, BaseEstimator):
    """Shared fit/validation logic for the signature transformers."""

    def _prepare(self, X):
        X = check_paths(X)
        if self.lead_lag:
            X = lead_lag(X).samples
        return X

    def fit(self, X, y=None):
        X = self._prepare(X)
        self.n_channels_in_ = X.shape[2]
        self._build(X)
        return self

    def _check_fitted_channels(self, X):
        if X.shape[2] != self.n_channels_in_:
            raise ShapeError(
                f"transformer was fitted with {self.n_channels_in_} channels "
                f"but got {X.shape[2]}"
            )


class SignatureFeatures(_PathTransformer):
    """Signature coefficients over a configurable word set.

    Parameters mirror the word-set descriptor: word_set selects the
    builder ("truncated", "anisotropic", "graph", "lyndon",
    "leadlag_sparse", "custom") and depth / gamma / r / edges / words
    supply its arguments.  With lead_lag=True the transform is applied to
    the lead-lag lift of the input (channel count doubles before the word
    set is built).

    >>> SignatureFeatures(depth=2).fit_transform(np.zeros((4, 10, 2))).shape
    (4, 6)
    """

    def __init__(
        self,
        word_set: str = "truncated",
        depth: int = 3,
        gamma=None,
        r=None,
        edges=None,
        words=None,
        include_empty: bool = False,
        lead_lag: bool = False,
        threads: int | None = None,
    ):
        self.word_set = word_set
        self.depth = depth
        self.gamma = gamma
        self.r = r
        self.edges = edges
        self.words = words
        self.include_empty = include_empty
        self.lead_lag = lead_lag
        self.threads = threads

    def _descriptor(self, d: int) -> dict:
        desc = {"type": self.word_set, "d": d, "include_empty": self.include_empty}
        for key in ("depth", "gamma", "r", "edges", "words"):
            value = getattr(self, key)
            if value is not None:
                desc[key] = value
        if self.word_set == "leadlag_sparse":
            if self.lead_lag:
                # the builder works on the underlying dimension
                desc["d"] = d // 2
            elif d % 2:
                raise ShapeError(
                    "leadlag_sparse without lead_lag=True needs an even "
                    f"channel count, got {d}"
                )
            else:
                desc["d"] = d // 2
        return desc

    def _build(self, X):
        self.wordset_ = wordset_from_descriptor(self._descriptor(X.shape[2]))

    def transform(self, X):
        X = self._prepare(X)
        self._check_fitted_channels(X)
        return signature_forward(X, self.wordset_, threads=self.threads).values

    def get_feature_names_out(self, input_features=None):
        names = self.wordset_.word_strings()
        if self.wordset_.include_empty:
            names = ["e"] + names
        return np.asarray(names, dtype=object)


class LogSignatureFeatures(_PathTransformer):
    """Log-signature coefficients at Lyndon words up to a depth."""

    def __init__(
        self, depth: int = 3, lead_lag: bool = False, threads: int | None = None
    ):
        self.depth = depth
        self.lead_lag = lead_lag
        self.threads = threads

    def _build(self, X):
        d = X.shape[2]
        self.wordset_ = build_lyndon(d, min(self.depth, 1) if d == 1 else self.depth)

    def transform(self, X):
        X = self._prepare(X)
        self._check_fitted_channels(X)
        return logsignature_forward(
            X, self.n_channels_in_, self.depth, threads=self.threads
        ).values

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.wordset_.word_strings(), dtype=object)


class WindowedSignatureFeatures(SignatureFeatures):
    """Signatures over sample-index windows, flattened window-major.

    Windows index the samples of the path the kernels see: after the
    lead-lag lift when lead_lag=True (2M+1 points).
    """

    def __init__(
        self,
        windows,
        word_set: str = "truncated",
        depth: int = 3,
        gamma=None,
        r=None,
        edges=None,
        words=None,
        include_empty: bool = False,
        lead_lag: bool = False,
        threads: int | None = None,
    ):
        super().__init__(
            word_set=word_set,
            depth=depth,
            gamma=gamma,
            r=r,
            edges=edges,
            words=words,
            include_empty=include_empty,
            lead_lag=lead_lag,
            threads=threads,
        )
        self.windows = windows

    def _build(self, X):
        super()._build(X)
        self.window_spec_ = WindowSpec(check_window_pairs(self.windows))

    def transform(self, X):
        X = self._prepare(X)
        self._check_fitted_channels(X)
        outs = signature_windows(X, self.wordset_, self.window_spec_, threads=self.threads)
        return np.hstack([out.values for out in outs])

    def get_feature_names_out(self, input_features=None):
        base = super().get_feature_names_out()
        names = [
            f"{l}:{r}|{name}"
            for l, r in np.asarray(self.window_spec_.pairs)
            for name in base
        ]
        return np.asarray(names, dtype=object)
