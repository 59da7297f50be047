import numpy as np
import pytest
from helpers import random_paths, rel_err

from sigkit.errors import DomainError
from sigkit.sigcore import signature_forward, signature_inverse
from sigkit.testkit import dense_signature_oracle, oracle_columns
from sigkit.transforms import lead_lag, time_reverse
from sigkit.words import encode_word
from sigkit.wordsets import build_custom, build_truncated


class TestLeadLag:
    def test_points_example(self):
        x = np.array([[[0.0], [1.0], [3.0]]])
        out = lead_lag(x)
        expected = np.array(
            [[[0, 0], [0, 1], [1, 1], [1, 3], [3, 3]]], dtype=np.float64
        )
        np.testing.assert_array_equal(out.samples, expected)
        assert out.base_d == 1
        assert (out.B, out.M, out.d) == (1, 4, 2)

    def test_constant_path(self):
        x = np.ones((2, 4, 3)) * 2.5
        out = lead_lag(x)
        assert np.all(out.samples == 2.5)

    def test_even_points_have_lag_equal_lead(self):
        rng = np.random.default_rng(70)
        out = lead_lag(random_paths(rng, 2, 5, 3))
        np.testing.assert_array_equal(
            out.samples[:, 0::2, :3], out.samples[:, 0::2, 3:]
        )

    def test_single_segment_signed_area(self):
        # 1D X = [0, 1]: area S(lag.lead) - S(lead.lag) = -(dX)^2 = -1
        out = lead_lag(np.array([[[0.0], [1.0]]]))
        ws = build_custom([(0, 1), (1, 0)], 2)
        sig = signature_forward(out, ws)
        area = sig.values[0, 0] - sig.values[0, 1]
        assert area == pytest.approx(-1.0, abs=1e-15)

    def test_quadratic_variation_any_path(self):
        rng = np.random.default_rng(71)
        for d in (1, 2, 3):
            paths = random_paths(rng, 3, 8, d)
            out = lead_lag(paths)
            ws = build_truncated(2 * d, 2)
            sig = signature_forward(out, ws)
            qv = np.sum(np.diff(paths, axis=1) ** 2, axis=1)  # (B, d)
            for i in range(d):
                lag_lead = sig.values[:, ws.index_of(encode_word((i, d + i), 2 * d))]
                lead_lag_ = sig.values[:, ws.index_of(encode_word((d + i, i), 2 * d))]
                np.testing.assert_allclose(lag_lead - lead_lag_, -qv[:, i], rtol=1e-12)

    def test_cross_channel_areas_match_dense_oracle(self):
        rng = np.random.default_rng(72)
        paths = random_paths(rng, 2, 6, 2)
        out = lead_lag(paths)
        ws = build_truncated(4, 2)
        sig = signature_forward(out, ws)
        oracle = oracle_columns(ws, dense_signature_oracle(out.samples, 4, 2))
        assert rel_err(sig.values, oracle) <= 1e-12
        # the discrete cross covariation shows up in the mixed areas
        cross = np.sum(
            np.diff(paths, axis=1)[:, :, 0] * np.diff(paths, axis=1)[:, :, 1], axis=1
        )
        area = (
            sig.values[:, ws.index_of(encode_word((0, 3), 4))]
            - sig.values[:, ws.index_of(encode_word((2, 1), 4))]
        )
        np.testing.assert_allclose(area, -cross, rtol=1e-12, atol=1e-13)

    def test_rejects_single_point(self):
        with pytest.raises(DomainError):
            lead_lag(np.zeros((1, 1, 2)))


class TestTimeReverse:
    def test_reverses_samples(self):
        x = np.array([[[1.0], [2.0], [3.0]]])
        np.testing.assert_array_equal(
            time_reverse(x).samples, [[[3.0], [2.0], [1.0]]]
        )

    def test_involution(self):
        rng = np.random.default_rng(73)
        paths = random_paths(rng, 2, 5, 3)
        np.testing.assert_array_equal(
            time_reverse(time_reverse(paths)).samples, paths
        )

    def test_signature_of_reverse_is_inverse(self):
        rng = np.random.default_rng(74)
        paths = random_paths(rng, 3, 6, 2)
        ws = build_truncated(2, 3)
        fwd = signature_forward(paths, ws)
        rev = signature_forward(time_reverse(paths), ws)
        assert rel_err(rev.values, signature_inverse(fwd).values) <= 1e-10
