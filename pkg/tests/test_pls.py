"""PLS extraction: closed-form weights, deflation algebra, transform replay."""

import math

import numpy as np
import pytest

from samkit import (
    DataError,
    DegenerateDirectionError,
    ParameterError,
    ShapeError,
    deflate,
    pls_fit,
    pls_transform,
)


def balanced_labels(n, rng):
    y = np.ones(n)
    y[n // 2 :] = -1.0
    return rng.permutation(y)


def first_weight_oracle(x, y):
    """Independent recomputation of the leading direction."""
    xc = x - x.mean(axis=0)
    v = xc.T @ y
    return v / np.linalg.norm(v)


class TestPlsFit:
    def test_single_column_equal_to_labels(self):
        rng = np.random.default_rng(0)
        y = balanced_labels(20, rng)
        x = y.reshape(-1, 1).copy()
        model = pls_fit(x, y, 1)
        assert model.weights[0, 0] == 1.0
        np.testing.assert_array_equal(model.train_scores[:, 0], y)

    def test_opposite_columns_split_the_weight(self):
        rng = np.random.default_rng(1)
        y = balanced_labels(30, rng)
        x = np.column_stack([y, -y])
        model = pls_fit(x, y, 1)
        w = model.weights[:, 0]
        np.testing.assert_allclose(np.abs(w), 1.0 / math.sqrt(2.0), atol=1e-12)
        assert w[0] > 0 > w[1]
        assert float(model.train_scores[:, 0] @ y) > 0

    def test_first_component_closed_form(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            x = rng.standard_normal((30, 5))
            y = balanced_labels(30, rng)
            model = pls_fit(x, y, 1)
            np.testing.assert_allclose(
                model.weights[:, 0], first_weight_oracle(x, y), atol=1e-8
            )

    def test_weight_columns_have_unit_norm(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal((50, 10))
        model = pls_fit(x, balanced_labels(50, rng), 4)
        np.testing.assert_allclose(
            np.linalg.norm(model.weights, axis=0), 1.0, atol=1e-10
        )

    def test_scores_nearly_orthogonal(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal((50, 10))
        model = pls_fit(x, balanced_labels(50, rng), 4)
        s = model.train_scores
        gram = s.T @ s
        scale = np.sqrt(np.outer(np.diag(gram), np.diag(gram)))
        off = np.abs(gram / scale - np.eye(4)).max()
        assert off <= 1e-8

    def test_leading_direction_maximizes_covariance(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((40, 6))
        y = balanced_labels(40, rng)
        model = pls_fit(x, y, 1)
        xc = x - x.mean(axis=0)
        best = float((xc @ model.weights[:, 0]) @ y) ** 2
        for _ in range(1000):
            u = rng.standard_normal(6)
            u /= np.linalg.norm(u)
            assert best >= float((xc @ u) @ y) ** 2 * (1.0 - 1e-10)

    def test_k_beyond_columns_rejected(self):
        rng = np.random.default_rng(6)
        with pytest.raises(ParameterError):
            pls_fit(rng.standard_normal((30, 5)), balanced_labels(30, rng), 6)

    def test_constant_features_are_degenerate(self):
        rng = np.random.default_rng(7)
        x = np.full((20, 3), 0.7)
        with pytest.raises(DegenerateDirectionError, match="component 1"):
            pls_fit(x, balanced_labels(20, rng), 1)

    def test_rank_exhaustion_names_the_component(self):
        rng = np.random.default_rng(8)
        y = balanced_labels(24, rng)
        x = np.outer(y, np.array([1.0, 2.0]))
        with pytest.raises(DegenerateDirectionError, match="component 2"):
            pls_fit(x, y, 2)

    def test_single_class_rejected(self):
        with pytest.raises(DataError):
            pls_fit(np.random.default_rng(9).standard_normal((10, 2)), np.ones(10), 1)


class TestPlsTransform:
    def test_training_scores_reproduced_bit_for_bit(self):
        rng = np.random.default_rng(10)
        x = rng.standard_normal((30, 5))
        model = pls_fit(x, balanced_labels(30, rng), 3)
        replay = pls_transform(model, x)
        assert replay.dtype == model.train_scores.dtype
        np.testing.assert_array_equal(replay, model.train_scores)

    def test_centering_row_maps_to_zero(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal((25, 4)) + 3.0
        model = pls_fit(x, balanced_labels(25, rng), 1)
        scores = pls_transform(model, model.centering.reshape(1, -1))
        assert np.all(scores == 0.0)

    def test_heldout_scores_track_labels(self):
        hits = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            y_all = np.concatenate([np.ones(100), -np.ones(100)])
            x_all = rng.standard_normal((200, 10))
            x_all[y_all == 1.0, :] += 0.5
            train, held = np.arange(0, 200, 2), np.arange(1, 200, 2)
            model = pls_fit(x_all[train], y_all[train], 1)
            scores = pls_transform(model, x_all[held])
            if float(scores[:, 0] @ y_all[held]) > 0:
                hits += 1
        assert hits > 50

    def test_column_mismatch_rejected(self):
        rng = np.random.default_rng(12)
        x = rng.standard_normal((20, 4))
        model = pls_fit(x, balanced_labels(20, rng), 1)
        with pytest.raises(ShapeError):
            pls_transform(model, rng.standard_normal((5, 3)))

    def test_model_serializes_to_json_types(self):
        import json

        rng = np.random.default_rng(13)
        model = pls_fit(rng.standard_normal((20, 4)), balanced_labels(20, rng), 2)
        payload = json.dumps(model.as_dict())
        back = json.loads(payload)
        assert back["k"] == 2
        assert len(back["weights"]) == 4 and len(back["weights"][0]) == 2
        assert len(back["centering"]) == 4


class TestDeflate:
    def test_annihilates_its_own_rank_one_term(self):
        rng = np.random.default_rng(20)
        s = rng.standard_normal(15)
        p = rng.standard_normal(4)
        x = np.outer(s, p)
        deflated, p_hat = deflate(x, s)
        np.testing.assert_allclose(deflated, 0.0, atol=1e-12 * np.abs(x).max())
        np.testing.assert_allclose(p_hat, p, atol=1e-12)

    def test_columns_orthogonal_to_score(self):
        rng = np.random.default_rng(21)
        x = rng.standard_normal((40, 7))
        s = x @ rng.standard_normal(7)
        deflated, _ = deflate(x, s)
        ratio = np.linalg.norm(deflated.T @ s) / (
            np.linalg.norm(x) * np.linalg.norm(s)
        )
        assert ratio <= 1e-10

    def test_rank_does_not_increase(self):
        rng = np.random.default_rng(22)
        x = rng.standard_normal((30, 3)) @ rng.standard_normal((3, 5))
        s = x @ rng.standard_normal(5)
        deflated, _ = deflate(x, s)
        rank = int(np.sum(np.linalg.svd(deflated, compute_uv=False) > 1e-9))
        assert rank <= 3

    def test_zero_score_rejected(self):
        with pytest.raises(DegenerateDirectionError):
            deflate(np.ones((5, 2)), np.zeros(5))
