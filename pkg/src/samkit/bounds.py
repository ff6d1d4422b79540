"""Distribution-free deviation bounds for linear classifiers.

Three analytic bounds on the gap between empirical and actual risk are
provided (finite-class, VC, and function-counting), together with two
validation oracles: exact enumeration of linearly separable labelings of a
point set, and a Monte Carlo estimate of the Rademacher average of the
0-1 loss class. All logarithms are natural.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy import sparse
from scipy.optimize import linprog
from scipy.special import gammaln, logsumexp

from .classify import _fit_linear, predict
from .errors import DataError, ParameterError, SizeError

if TYPE_CHECKING:  # pragma: no cover
    from .dataio import LabeledDataset

_LN2 = math.log(2.0)

# Strict-separation margin below which a labeling counts as non-separable.
_SEPARATION_TOL = 1e-9

# Relative determinant threshold for the general-position check.
_DEGENERACY_TOL = 1e-12

_METHODS = ("massart", "vc", "cover")


class DegeneracyWarning(UserWarning):
    """Point set is not in general position; counts may be off-model."""


@dataclass(frozen=True)
class GrowthFunction:
    """Log of the number of linearly separable labelings of n points."""

    log_n_dichotomies: float


@dataclass(frozen=True)
class BoundRequest:
    """One bound evaluation: method, sample size, dimension, confidence."""

    method: str
    n: int
    dim: int
    delta: float

    def __post_init__(self) -> None:
        if self.method not in _METHODS:
            raise ParameterError(f"unknown bound method {self.method!r}")
        if self.n < 1:
            raise ParameterError(f"n must be >= 1, got {self.n}")
        if self.dim < 1:
            raise ParameterError(f"dim must be >= 1, got {self.dim}")
        _check_delta(self.delta)


@dataclass(frozen=True)
class BoundResult:
    """A deviation term delta_n plus the request that produced it.

    vacuous is True exactly when delta_n >= 1, i.e. the bound says nothing
    about a quantity that lives in [0, 1]. The value is never clamped.
    """

    delta_n: float
    vacuous: bool
    method: str
    n: int
    dim: int | None
    delta: float

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "n": self.n,
            "dim": self.dim,
            "delta": self.delta,
            "delta_n": self.delta_n,
            "vacuous": self.vacuous,
        }


@dataclass(frozen=True)
class RademacherEstimate:
    """Monte Carlo estimate of a Rademacher average, with standard error."""

    estimate: float
    stderr: float
    trials: int


def _check_delta(delta: float, *, allow_one: bool = False) -> None:
    top_ok = delta <= 1.0 if allow_one else delta < 1.0
    if not (0.0 < delta and top_ok):
        top = "1]" if allow_one else "1)"
        raise ParameterError(f"delta must lie in (0, {top}, got {delta}")


def _check_count(name: str, value: int, minimum: int = 1) -> None:
    if not isinstance(value, (int, np.integer)):
        raise ParameterError(f"{name} must be an integer, got {type(value).__name__}")
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")


def log_growth_cover(n: int, d: int) -> GrowthFunction:
    """Log count of homogeneous linear dichotomies of n points in d dims.

    Closed form 2 * sum_{k<d} C(n-1, k), evaluated in log space so n up to
    1e6 works without overflow. Equals n*log(2) exactly when n <= d (every
    labeling achievable).
    """
    _check_count("n", n)
    _check_count("d", d)
    if n <= d:
        return GrowthFunction(n * _LN2)
    ks = np.arange(d)
    log_binom = gammaln(n) - gammaln(ks + 1.0) - gammaln(n - ks)
    return GrowthFunction(float(_LN2 + logsumexp(log_binom)))


def hoeffding_term(n: int, delta: float) -> float:
    """sqrt(log(1/delta) / (2n)): the single-function deviation term.

    delta = 1 is allowed and gives exactly 0.
    """
    _check_count("n", n)
    _check_delta(delta, allow_one=True)
    return math.sqrt(math.log(1.0 / delta) / (2.0 * n))


def massart_bound(n: int, log_n_dichotomies: float, delta: float) -> BoundResult:
    """Finite-class bound 8*sqrt(log N / n) + sqrt(log(1/delta) / (2n)).

    Takes the log of the effective class size directly, so any growth
    estimate can be plugged in. The result carries dim = None; use
    evaluate_bound to tie the class size to a dimension.
    """
    _check_count("n", n)
    _check_delta(delta)
    if log_n_dichotomies < 0.0:
        raise ParameterError(
            f"log_n_dichotomies must be >= 0, got {log_n_dichotomies}"
        )
    delta_n = 8.0 * math.sqrt(log_n_dichotomies / n) + hoeffding_term(n, delta)
    return BoundResult(delta_n, delta_n >= 1.0, "massart", n, None, delta)


def vc_bound(n: int, h: int, delta: float) -> BoundResult:
    """VC deviation term sqrt((h*(log(2n/h) + 1) - log(delta/4)) / n).

    h is the VC dimension; for affine separators in dim features h = dim + 1,
    and the result echoes dim = h - 1.
    """
    _check_count("h", h)
    _check_count("n", n, minimum=h)
    _check_delta(delta)
    delta_n = math.sqrt((h * (math.log(2.0 * n / h) + 1.0) - math.log(delta / 4.0)) / n)
    return BoundResult(delta_n, delta_n >= 1.0, "vc", n, h - 1, delta)


def cover_bound(n: int, d: int, delta: float) -> BoundResult:
    """Function-counting bound sqrt(((d-1)*log(n+1) + 2 + log(1/delta)) / (2n)).

    With d = 1 the polynomial term vanishes and the bound reduces to a
    Hoeffding-style term with an extra +2 in the numerator.
    """
    _check_count("n", n)
    _check_count("d", d)
    _check_delta(delta)
    num = (d - 1) * math.log(n + 1.0) + (2.0 + math.log(1.0 / delta))
    delta_n = math.sqrt(num / (2.0 * n))
    return BoundResult(delta_n, delta_n >= 1.0, "cover", n, d, delta)


def evaluate_bound(request: BoundRequest) -> BoundResult:
    """Dispatch a BoundRequest to the right formula.

    massart uses the exact dichotomy count for dim dimensions as its class
    size; vc uses h = dim + 1; cover uses d = dim.
    """
    if request.method == "massart":
        growth = log_growth_cover(request.n, request.dim)
        inner = massart_bound(request.n, growth.log_n_dichotomies, request.delta)
        return BoundResult(
            inner.delta_n, inner.vacuous, "massart", request.n, request.dim, request.delta
        )
    if request.method == "vc":
        return vc_bound(request.n, request.dim + 1, request.delta)
    return cover_bound(request.n, request.dim, request.delta)


def _warn_if_degenerate(pts: np.ndarray) -> None:
    """Warn unless every min(n, d)-subset of rows is linearly independent."""
    n, d = pts.shape
    norms = np.linalg.norm(pts, axis=1)
    if np.any(norms == 0.0):
        warnings.warn(
            "point set contains the origin; not in general position",
            DegeneracyWarning,
            stacklevel=3,
        )
        return
    if n <= d:
        # One subset: the whole set. Rank deficiency means degeneracy.
        s = np.linalg.svd(pts, compute_uv=False)
        if s[-1] <= _DEGENERACY_TOL * s[0] * max(n, d):
            warnings.warn(
                "point set is rank deficient; not in general position",
                DegeneracyWarning,
                stacklevel=3,
            )
        return
    subsets = np.array(list(itertools.combinations(range(n), d)))
    dets = np.abs(np.linalg.det(pts[subsets]))
    scales = np.prod(norms[subsets], axis=1)
    if np.any(dets <= _DEGENERACY_TOL * scales):
        warnings.warn(
            "some d-subsets of points are linearly dependent; "
            "not in general position",
            DegeneracyWarning,
            stacklevel=3,
        )


def _count_separable(sign_batch: np.ndarray, pts: np.ndarray) -> int:
    """Count labelings in sign_batch that admit a strict linear separation.

    One block-diagonal LP decides the whole batch: per labeling y, maximize
    t subject to y_i <x_i, w> >= t, w in [-1, 1]^d, t <= 1. The labeling is
    separable exactly when the optimum exceeds the separation tolerance.
    """
    b, n = sign_batch.shape
    d = pts.shape[1]
    width = d + 1

    # Constraint rows: -y_i * x_i . w + t <= 0 for each point of each block.
    data = np.empty((b, n, width))
    data[:, :, :d] = -sign_batch[:, :, None] * pts[None, :, :]
    data[:, :, d] = 1.0
    rows = np.repeat(np.arange(b * n), width)
    cols = (
        np.repeat(np.arange(b) * width, n * width).reshape(b, n, width)
        + np.tile(np.arange(width), (b, n, 1))
    )
    a_ub = sparse.coo_matrix(
        (data.ravel(), (rows, cols.ravel())), shape=(b * n, b * width)
    ).tocsr()

    c = np.zeros(b * width)
    c[d::width] = -1.0
    var_bounds = ([(-1.0, 1.0)] * d + [(None, 1.0)]) * b
    res = linprog(c, A_ub=a_ub, b_ub=np.zeros(b * n), bounds=var_bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"separability LP failed with status {res.status}")
    t_opt = res.x.reshape(b, width)[:, d]
    return int(np.count_nonzero(t_opt > _SEPARATION_TOL))


def enumerate_dichotomies(points: np.ndarray, homogeneous: bool = True) -> int:
    """Exact number of labelings of the points a linear classifier can realize.

    Homogeneous mode counts sign patterns of <w, x>; affine mode lifts the
    points with a constant coordinate and counts sign patterns of
    <w, x> + b. Labelings come in +/- pairs, so only those with the first
    label positive are solved and the count is doubled. Cost grows as
    2^(n-1) LP feasibility checks; n is capped at 16.

    Degenerate (non-general-position) inputs produce a DegeneracyWarning
    and the count is still returned.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ParameterError("points must be a 2-D array")
    n = pts.shape[0]
    if n < 1:
        raise ParameterError("need at least one point")
    if not np.all(np.isfinite(pts)):
        raise DataError("points contain non-finite values")
    if n > 16:
        raise SizeError(f"enumeration is capped at 16 points, got {n}")
    if not homogeneous:
        pts = np.hstack([pts, np.ones((n, 1))])

    _warn_if_degenerate(pts)

    half = np.array(list(itertools.product((1.0, -1.0), repeat=n - 1)))
    signs = np.hstack([np.ones((half.shape[0], 1)), half]) if n > 1 else np.ones((1, 1))

    feasible = 0
    batch = 512
    for start in range(0, signs.shape[0], batch):
        feasible += _count_separable(signs[start : start + batch], pts)
    return 2 * feasible


def rademacher_monte_carlo(
    dataset: "LabeledDataset", trials: int, seed: int = 0
) -> RademacherEstimate:
    """Monte Carlo estimate of the Rademacher average of the 0-1 loss class.

    Each trial draws signs sigma, then needs sup over homogeneous linear
    classifiers of the signed mean loss. Writing the loss through agreement
    with pseudo-labels tau = sigma * y turns the sup into empirical risk
    minimization on (X, tau), approximated by a hinge fit (c_reg = 10, no
    intercept); the class is sign-symmetric, so the better of the fit and
    its negation is used. Trials draw from counter-based substreams of the
    seed, so the estimate does not depend on evaluation order.
    """
    _check_count("trials", trials)
    x = np.ascontiguousarray(dataset.features, dtype=float)
    y = np.asarray(dataset.labels, dtype=float)
    n = x.shape[0]
    if n == 0:
        raise DataError("dataset is empty")

    values = np.empty(trials)
    for t in range(trials):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=seed, spawn_key=(t,))
        )
        sigma = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        tau = sigma * y
        model = _fit_linear(x, tau, c_reg=10.0, tol=1e-6, fit_intercept=False)
        errors = int(np.count_nonzero(predict(model, x) != tau.astype(np.int64)))
        best_agreement = abs(n - 2 * errors) / (2.0 * n)
        values[t] = abs(float(sigma.mean())) / 2.0 + best_agreement

    estimate = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return RademacherEstimate(estimate, stderr, trials)
