"""End-to-end map construction and bound-validation experiments.

A map run fits, per region, a k-component PLS projection followed by a
hinge-loss linear classifier, converts the in-sample accuracy into a
worst-case accuracy through the configured deviation bound (evaluated at
dimension k, the classifier's input dimension, not the raw voxel count),
and tests the result against chance. Regions are independent given the
region count, so they can be processed in parallel; results are merged in
region order, making parallel and serial runs identical.

The coverage experiment validates the bounds themselves: each trial fits
the same pipeline on a fresh synthetic training set and checks the actual
risk (measured on a large holdout) against the certified interval.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bounds import BoundRequest, evaluate_bound
from .classify import empirical_risk, svm_fit
from .dataio import LabeledDataset, Parcellation
from .errors import DegenerateDirectionError, ParameterError, ShapeError
from .inference import (
    ProportionTest,
    RoiAnalysis,
    SamReport,
    p_value_one_sided,
    proportion_z,
    select_significant,
    worst_case_accuracy,
)
from .pls import pls_fit, pls_transform

_BOUND_METHODS = ("massart", "vc", "cover")
_DENOMINATORS = ("rois", "samples")
_STATISTICS = ("worst_case", "empirical")

# Synthetic population used by the coverage experiment: two balanced
# Gaussian classes in dim + 2 raw features, separated by a 2.0 sd shift
# on the first feature (Bayes risk about 0.16).
_COVERAGE_EXTRA_FEATURES = 2
_COVERAGE_SHIFT = 2.0
_COVERAGE_HOLDOUT = 100_000


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs for a map run; defaults follow the package's standard recipe."""

    k: int = 1
    bound_method: str = "cover"
    delta: float = 0.05
    alpha: float = 0.05
    c_reg: float = 1.0
    statistic: str = "worst_case"
    denominator: str = "rois"
    dim_includes_bias: bool = False

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        if self.bound_method not in _BOUND_METHODS:
            raise ParameterError(f"unknown bound method {self.bound_method!r}")
        if not 0.0 < self.delta < 1.0:
            raise ParameterError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.c_reg <= 0.0:
            raise ParameterError(f"c_reg must be > 0, got {self.c_reg}")
        if self.statistic not in _STATISTICS:
            raise ParameterError(f"unknown statistic {self.statistic!r}")
        if self.denominator not in _DENOMINATORS:
            raise ParameterError(f"unknown denominator {self.denominator!r}")

    def bound_dim(self) -> int:
        return self.k + 1 if self.dim_includes_bias else self.k

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "bound_method": self.bound_method,
            "delta": self.delta,
            "alpha": self.alpha,
            "c_reg": self.c_reg,
            "statistic": self.statistic,
            "denominator": self.denominator,
            "dim_includes_bias": self.dim_includes_bias,
        }


@dataclass(frozen=True)
class CoverageResult:
    """Violation tally of one bound-validation run."""

    trials: int
    violations: int
    violation_rate: float
    method: str
    n: int
    dim: int
    delta: float

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "violations": self.violations,
            "violation_rate": self.violation_rate,
            "method": self.method,
            "n": self.n,
            "dim": self.dim,
            "delta": self.delta,
        }


def _majority_accuracy(labels: np.ndarray) -> float:
    n = labels.shape[0]
    positives = int(np.count_nonzero(labels == 1))
    return max(positives, n - positives) / n


def analyze_roi(
    dataset: LabeledDataset,
    config: PipelineConfig,
    l: int,
    roi_id: int = 0,
    roi_name: str = "roi_000",
) -> RoiAnalysis:
    """Fit one region and test its accuracy against chance.

    A region whose features carry no covariance with the labels cannot be
    fitted; it falls back to the majority-class accuracy, is flagged
    degenerate, and is never significant.
    """
    x, y = dataset.features, dataset.labels
    n = x.shape[0]
    degenerate = False
    try:
        model = pls_fit(x, y.astype(float), config.k)
        clf = svm_fit(model.train_scores, y, c_reg=config.c_reg)
        accuracy = empirical_risk(clf, model.train_scores, y).empirical_accuracy
    except DegenerateDirectionError:
        degenerate = True
        accuracy = _majority_accuracy(np.asarray(y))

    delta_n = evaluate_bound(
        BoundRequest(config.bound_method, n, config.bound_dim(), config.delta)
    ).delta_n
    worst = worst_case_accuracy(accuracy, delta_n)

    test = ProportionTest(l=l, alpha=config.alpha)
    value = worst if config.statistic == "worst_case" else accuracy
    z = proportion_z(value, test)
    p = p_value_one_sided(z)
    return RoiAnalysis(
        roi_id=roi_id,
        roi_name=roi_name,
        n=n,
        k=config.k,
        empirical_accuracy=accuracy,
        delta_n=delta_n,
        worst_case_accuracy=worst,
        z=z,
        p_value=p,
        significant=bool(p < config.alpha) and not degenerate,
        degenerate=degenerate,
    )


def _analyze_task(payload: tuple) -> RoiAnalysis:
    roi_id, roi_name, features, labels, config, l = payload
    return analyze_roi(
        LabeledDataset(features, labels), config, l, roi_id=roi_id, roi_name=roi_name
    )


def build_sam(
    dataset: LabeledDataset,
    parcellation: Parcellation,
    config: PipelineConfig = PipelineConfig(),
    workers: int = 1,
) -> SamReport:
    """Analyze every region of the parcellation and assemble the report."""
    dataset.validate()
    if dataset.d != parcellation.d:
        raise ShapeError(
            f"dataset has {dataset.d} features but the parcellation "
            f"covers {parcellation.d}"
        )
    l = parcellation.l if config.denominator == "rois" else dataset.n
    test = ProportionTest(l=l, alpha=config.alpha)

    payloads = [
        (
            roi_id,
            parcellation.roi_names[roi_id],
            dataset.features[:, parcellation.feature_indices(roi_id)],
            dataset.labels,
            config,
            l,
        )
        for roi_id in parcellation.roi_ids
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            analyses = list(pool.map(_analyze_task, payloads))
    else:
        analyses = [_analyze_task(p) for p in payloads]

    extra = config.as_dict()
    extra["l"] = l
    extra["n"] = dataset.n
    return select_significant(
        analyses, test, statistic=config.statistic, extra_config=extra
    )


def _coverage_trial(payload: tuple) -> bool:
    trial, seed, n, dim, delta_n, c_reg = payload
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))
    d_raw = dim + _COVERAGE_EXTRA_FEATURES
    half = n // 2

    x_train = rng.standard_normal((n, d_raw))
    x_train[:half, 0] += _COVERAGE_SHIFT
    y_train = np.concatenate([np.ones(half), -np.ones(n - half)])

    model = pls_fit(x_train, y_train, dim)
    clf = svm_fit(model.train_scores, y_train, c_reg=c_reg)
    emp = empirical_risk(clf, model.train_scores, y_train).empirical_risk

    h = _COVERAGE_HOLDOUT
    x_hold = rng.standard_normal((h, d_raw))
    x_hold[: h // 2, 0] += _COVERAGE_SHIFT
    y_hold = np.concatenate([np.ones(h // 2), -np.ones(h - h // 2)])
    actual = empirical_risk(clf, pls_transform(model, x_hold), y_hold).empirical_risk
    return bool(actual > emp + delta_n)


def coverage_experiment(
    n: int,
    dim: int,
    method: str = "cover",
    delta: float = 0.05,
    trials: int = 2000,
    seed: int = 0,
    workers: int = 1,
    c_reg: float = 1.0,
) -> CoverageResult:
    """Measure how often actual risk escapes the certified interval.

    Each trial draws a fresh training set from the fixed synthetic
    population, fits the standard per-region pipeline with k = dim, and
    checks actual risk (on a 100k holdout) against empirical risk plus the
    bound. Trial randomness comes from counter-based substreams, so the
    result is independent of worker scheduling.
    """
    if trials < 100:
        raise ParameterError(f"trials must be >= 100, got {trials}")
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    delta_n = evaluate_bound(BoundRequest(method, n, dim, delta)).delta_n

    payloads = [(t, seed, n, dim, delta_n, c_reg) for t in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            flags = list(pool.map(_coverage_trial, payloads, chunksize=16))
    else:
        flags = [_coverage_trial(p) for p in payloads]

    violations = int(sum(flags))
    return CoverageResult(trials, violations, violations / trials, method, n, dim, delta)


def bound_curve(
    n_grid: Sequence[int],
    dim_grid: Sequence[int],
    method: str = "cover",
    delta: float = 0.05,
) -> list[tuple[int, int, float]]:
    """Tabulate delta_n over a grid, n-major, as (n, dim, delta_n) rows."""
    if len(n_grid) == 0 or len(dim_grid) == 0:
        raise ParameterError("n_grid and dim_grid must be non-empty")
    rows = []
    for n in n_grid:
        for dim in dim_grid:
            res = evaluate_bound(BoundRequest(method, int(n), int(dim), delta))
            rows.append((int(n), int(dim), res.delta_n))
    return rows
