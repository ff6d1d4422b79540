"""Linear SVM training on low-dimensional score vectors.

The solver is dual coordinate descent on the L1-hinge SVM with a fixed
cyclic update order and a duality-gap stopping rule, compiled with numba.
The intercept is handled as an augmented constant feature, so the primal
objective is 0.5*||(w, b)||^2 + c_reg * sum hinge. Everything is
deterministic: same inputs give bit-identical models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DataError, ParameterError, ShapeError

# Duality-gap stopping tolerance and the epoch cap behind converged=False.
DEFAULT_TOL = 1e-6
_MAX_EPOCHS = 10_000


@dataclass(frozen=True)
class LinearClassifier:
    """Affine decision rule sign(<w, x> + b), with ties going to +1."""

    w: np.ndarray
    b: float
    c_reg: float
    converged: bool
    final_objective: float

    def as_dict(self) -> dict:
        return {
            "w": [float(v) for v in self.w],
            "b": self.b,
            "c_reg": self.c_reg,
            "converged": self.converged,
            "final_objective": self.final_objective,
        }


@dataclass(frozen=True)
class RiskEstimate:
    """In-sample 0-1 loss; risk * n is always an integer count."""

    empirical_risk: float
    empirical_accuracy: float
    n: int


@njit(cache=True)
def _dual_cd(xa, y, c_reg, tol, max_epochs):  # pragma: no cover - compiled
    n, d = xa.shape
    alpha = np.zeros(n)
    w = np.zeros(d)
    qii = np.empty(n)
    for i in range(n):
        s = 0.0
        for j in range(d):
            s += xa[i, j] * xa[i, j]
        qii[i] = s
        # Zero rows contribute a constant to the dual; pin them at the cap.
        if s <= 0.0:
            alpha[i] = c_reg

    gap = np.inf
    epochs = 0
    for epoch in range(max_epochs):
        for i in range(n):
            if qii[i] <= 0.0:
                continue
            margin = 0.0
            for j in range(d):
                margin += w[j] * xa[i, j]
            grad = y[i] * margin - 1.0
            a_new = alpha[i] - grad / qii[i]
            if a_new < 0.0:
                a_new = 0.0
            elif a_new > c_reg:
                a_new = c_reg
            if a_new != alpha[i]:
                step = (a_new - alpha[i]) * y[i]
                for j in range(d):
                    w[j] += step * xa[i, j]
                alpha[i] = a_new

        w_sq = 0.0
        for j in range(d):
            w_sq += w[j] * w[j]
        hinge = 0.0
        alpha_sum = 0.0
        for i in range(n):
            margin = 0.0
            for j in range(d):
                margin += w[j] * xa[i, j]
            slack = 1.0 - y[i] * margin
            if slack > 0.0:
                hinge += slack
            alpha_sum += alpha[i]
        primal = 0.5 * w_sq + c_reg * hinge
        dual = alpha_sum - 0.5 * w_sq
        gap = primal - dual
        epochs = epoch + 1
        if gap <= tol:
            break
    return w, gap, epochs


def _fit_linear(
    x: np.ndarray,
    y: np.ndarray,
    c_reg: float,
    tol: float,
    fit_intercept: bool,
    max_epochs: int = _MAX_EPOCHS,
) -> LinearClassifier:
    """Solver entry without label-balance validation (package internal)."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n, k = x.shape
    xa = np.hstack([x, np.ones((n, 1))]) if fit_intercept else x
    w_aug, gap, _ = _dual_cd(xa, y, float(c_reg), float(tol), max_epochs)

    margins = xa @ w_aug
    hinge = float(np.maximum(0.0, 1.0 - y * margins).sum())
    objective = 0.5 * float(w_aug @ w_aug) + float(c_reg) * hinge
    if fit_intercept:
        w, b = w_aug[:k].copy(), float(w_aug[k])
    else:
        w, b = w_aug.copy(), 0.0
    return LinearClassifier(w, b, float(c_reg), bool(gap <= tol), objective)


def svm_fit(
    scores: np.ndarray,
    y: np.ndarray,
    c_reg: float = 1.0,
    tol: float = DEFAULT_TOL,
    max_epochs: int = _MAX_EPOCHS,
) -> LinearClassifier:
    """Fit the hinge-loss linear classifier on an n x k score matrix.

    Requires n >= 2 and both labels present; c_reg > 0 trades margin against
    slack. If the duality gap has not reached tol within the epoch cap the
    model is still returned with converged = False.
    """
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(y)
    if scores.ndim != 2:
        raise ShapeError("scores must be a 2-D array")
    n, k = scores.shape
    if n < 2:
        raise DataError(f"need at least 2 samples, got {n}")
    if k < 1:
        raise ShapeError("scores must have at least one column")
    if y.shape != (n,):
        raise ShapeError(f"labels must have shape ({n},), got {y.shape}")
    if not np.all(np.isfinite(scores)):
        raise DataError("scores contain non-finite values")
    if not np.all(np.isin(y, (-1, 1))):
        raise DataError("labels must be -1 or +1")
    if np.unique(y).size < 2:
        raise DataError("both classes must be present")
    if c_reg <= 0.0:
        raise ParameterError(f"c_reg must be > 0, got {c_reg}")
    if tol <= 0.0:
        raise ParameterError(f"tol must be > 0, got {tol}")
    return _fit_linear(scores, y, c_reg, tol, fit_intercept=True, max_epochs=max_epochs)


def predict(model: LinearClassifier, scores: np.ndarray) -> np.ndarray:
    """Labels sign(<w, x> + b) in {-1, +1}; a zero margin predicts +1."""
    scores = np.asarray(scores, dtype=float)
    if scores.ndim != 2:
        raise ShapeError("scores must be a 2-D array")
    if scores.shape[1] != model.w.shape[0]:
        raise ShapeError(
            f"scores have {scores.shape[1]} columns, model expects {model.w.shape[0]}"
        )
    margins = scores @ model.w + model.b
    return np.where(margins >= 0.0, 1, -1).astype(np.int64)


def empirical_risk(
    model: LinearClassifier, scores: np.ndarray, y: np.ndarray
) -> RiskEstimate:
    """Fraction of training points the model mislabels."""
    y = np.asarray(y)
    n = y.shape[0]
    if n < 1:
        raise DataError("need at least one sample")
    wrong = int(np.count_nonzero(predict(model, scores) != y.astype(np.int64)))
    risk = wrong / n
    return RiskEstimate(risk, 1.0 - risk, n)
