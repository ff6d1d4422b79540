"""Partial least squares feature extraction for two-class labels.

Single-response PLS with the classic deflation chain. With a single
response the per-component weight has a closed form, the current matrix's
column covariances with the labels, normalized to unit length; covariance
with the labels is then automatically positive, which fixes the sign
convention. Columns are centered inside fit and the centering vector is
stored so transform can replay the exact chain; transforming the training
matrix reproduces the stored scores bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DegenerateDirectionError, ParameterError, ShapeError

# A covariance this small, relative to the scale of the deflated matrix and
# the labels, is indistinguishable from zero and stops the chain.
_COV_TOL = 1e-12


@dataclass(frozen=True)
class PlsModel:
    """Projection weights and deflation loadings for k components."""

    weights: np.ndarray
    loadings: np.ndarray
    centering: np.ndarray
    k: int
    train_scores: np.ndarray

    def as_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "loadings": self.loadings.tolist(),
            "centering": self.centering.tolist(),
            "k": self.k,
        }


def deflate(x: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Remove the rank-one component of x explained by the score vector s.

    Returns (x', p) with p = x^T s / (s^T s) and x' = x - s p^T, so x' has
    columns orthogonal to s. Requires s^T s > 0.
    """
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    if x.ndim != 2 or s.ndim != 1 or s.shape[0] != x.shape[0]:
        raise ShapeError("x must be n x d and s must have length n")
    ss = float(s @ s)
    if ss <= 0.0:
        raise DegenerateDirectionError("score vector has zero norm")
    p = (x.T @ s) / ss
    return x - np.outer(s, p), p


def pls_fit(x: np.ndarray, y: np.ndarray, k: int = 1) -> PlsModel:
    """Extract k PLS components from features x and labels y in {-1, +1}.

    Labels stay uncentered. Each component maximizes squared covariance
    between the projected (deflated, centered) features and the labels;
    the weight columns have unit norm.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 2:
        raise ShapeError("x must be a 2-D array")
    n, d = x.shape
    if y.shape != (n,):
        raise ShapeError(f"labels must have shape ({n},), got {y.shape}")
    if n < 2:
        raise DataError(f"need at least 2 samples, got {n}")
    if not np.all(np.isfinite(x)):
        raise DataError("features contain non-finite values")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise DataError("labels must be -1 or +1")
    if np.unique(y).size < 2:
        raise DataError("both classes must be present")
    if not 1 <= k <= d:
        raise ParameterError(f"k must lie in [1, {d}], got {k}")

    centering = x.mean(axis=0)
    current = x - centering
    y_norm = float(np.linalg.norm(y))
    x_scale = max(1.0, float(np.linalg.norm(x)))

    weights = np.empty((d, k))
    loadings = np.empty((d, k))
    scores = np.empty((n, k))
    for j in range(k):
        cov = current.T @ y
        cov_norm = float(np.linalg.norm(cov))
        if cov_norm <= _COV_TOL * x_scale * y_norm:
            raise DegenerateDirectionError(
                f"component {j + 1}: feature-label covariance is zero"
            )
        weights[:, j] = cov / cov_norm
        w_col = weights[:, j].copy()
        s = current @ w_col
        current, loadings[:, j] = deflate(current, s)
        scores[:, j] = s
    return PlsModel(weights, loadings, centering, k, scores)


def pls_transform(model: PlsModel, x: np.ndarray) -> np.ndarray:
    """Project an m x d matrix onto the model's components.

    Replays the training chain (center, project, deflate) with the stored
    weights and loadings, so applying it to the training matrix returns
    train_scores exactly.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ShapeError("x must be a 2-D array")
    d = model.weights.shape[0]
    if x.shape[1] != d:
        raise ShapeError(f"x has {x.shape[1]} columns, model expects {d}")

    current = x - model.centering
    scores = np.empty((x.shape[0], model.k))
    for j in range(model.k):
        w_col = model.weights[:, j].copy()
        s = current @ w_col
        scores[:, j] = s
        if j + 1 < model.k:
            current = current - np.outer(s, model.loadings[:, j].copy())
    return scores
