"""Region-level significance testing of classifier accuracy.

Each region's accuracy statistic (worst-case by default, i.e. empirical
accuracy minus the deviation bound) is compared against chance with a
one-sided proportion z-test: z = (stat - pi0) / sigma0 with
sigma0 = sqrt(pi0 (1 - pi0) / l). The p-value is the upper normal tail,
computed through the complementary error function, whose absolute error
is a few double-precision ulps, far below the 1e-10 the tests require.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

from .errors import DataError, ParameterError

_SQRT2 = math.sqrt(2.0)

STATISTICS = ("worst_case", "empirical")


@dataclass(frozen=True)
class ProportionTest:
    """One-sided test of a proportion against chance level pi0.

    l is the denominator of the null standard error. With pi0 = 0.5 the
    large-sample normal approximation needs l >= 20, enforced here.
    """

    l: int
    pi0: float = 0.5
    alpha: float = 0.05

    def __post_init__(self) -> None:
        if not 0.0 < self.pi0 < 1.0:
            raise ParameterError(f"pi0 must lie in (0, 1), got {self.pi0}")
        if self.l < 1:
            raise ParameterError(f"l must be >= 1, got {self.l}")
        if self.pi0 == 0.5 and self.l < 20:
            raise ParameterError(
                f"pi0 = 0.5 needs l >= 20 for the normal approximation, got {self.l}"
            )
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def sigma0(self) -> float:
        return math.sqrt(self.pi0 * (1.0 - self.pi0) / self.l)


@dataclass(frozen=True)
class RoiAnalysis:
    """Everything the report records about one region."""

    roi_id: int
    roi_name: str
    n: int
    k: int
    empirical_accuracy: float
    delta_n: float
    worst_case_accuracy: float
    z: float
    p_value: float
    significant: bool
    degenerate: bool = False

    def as_dict(self) -> dict:
        return {
            "roi_id": self.roi_id,
            "roi_name": self.roi_name,
            "n": self.n,
            "k": self.k,
            "empirical_accuracy": self.empirical_accuracy,
            "delta_n": self.delta_n,
            "worst_case_accuracy": self.worst_case_accuracy,
            "z": self.z,
            "p_value": self.p_value,
            "significant": self.significant,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class SamReport:
    """Per-region analysis table plus the configuration that produced it."""

    regions: tuple[RoiAnalysis, ...]
    config: dict

    @property
    def significant_rois(self) -> tuple[int, ...]:
        return tuple(r.roi_id for r in self.regions if r.significant)

    def as_dict(self) -> dict:
        return {
            "config": dict(self.config),
            "regions": [r.as_dict() for r in self.regions],
        }


def worst_case_accuracy(accuracy: float, delta_n: float) -> float:
    """Guaranteed accuracy floor: the empirical value minus the bound.

    Clamped into [0, 1]; a vacuous bound gives 0, a zero bound returns the
    accuracy unchanged.
    """
    if not 0.0 <= accuracy <= 1.0:
        raise ParameterError(f"accuracy must lie in [0, 1], got {accuracy}")
    if delta_n < 0.0:
        raise ParameterError(f"delta_n must be >= 0, got {delta_n}")
    return min(1.0, max(0.0, accuracy - delta_n))


def proportion_z(pi_hat: float, test: ProportionTest) -> float:
    """Standardized distance of an observed proportion from the null."""
    sigma0 = test.sigma0
    if sigma0 == 0.0:
        raise ParameterError("sigma0 is zero; the test is undefined")
    return (pi_hat - test.pi0) / sigma0


def p_value_one_sided(z: float) -> float:
    """Upper-tail normal probability 1 - Phi(z) via erfc(z / sqrt(2)) / 2.

    Floored at the smallest positive float so the value stays in (0, 1]
    even where erfc underflows (z beyond about 38).
    """
    p = 0.5 * math.erfc(z / _SQRT2)
    return p if p > 0.0 else math.ulp(0.0)


def select_significant(
    analyses: Sequence[RoiAnalysis],
    test: ProportionTest,
    statistic: str = "worst_case",
    bonferroni: bool = False,
    extra_config: dict | None = None,
) -> SamReport:
    """Run the proportion test over regions and assemble the report.

    The tested statistic is the worst-case accuracy by default, or the raw
    empirical accuracy. Regions flagged degenerate keep their computed z
    and p but are never marked significant. Rows are ordered by roi_id.
    With bonferroni=True the threshold becomes alpha / number-of-regions.
    """
    if len(analyses) == 0:
        raise DataError("no regions to test")
    if statistic not in STATISTICS:
        raise ParameterError(f"statistic must be one of {STATISTICS}, got {statistic!r}")
    threshold = test.alpha / len(analyses) if bonferroni else test.alpha

    rows = []
    for roi in sorted(analyses, key=lambda a: a.roi_id):
        value = (
            roi.worst_case_accuracy if statistic == "worst_case" else roi.empirical_accuracy
        )
        z = proportion_z(value, test)
        p = p_value_one_sided(z)
        rows.append(
            replace(
                roi,
                z=z,
                p_value=p,
                significant=bool(p < threshold) and not roi.degenerate,
            )
        )

    config = {
        "statistic": statistic,
        "pi0": test.pi0,
        "l": test.l,
        "sigma0": test.sigma0,
        "alpha": test.alpha,
        "bonferroni": bonferroni,
    }
    if extra_config:
        config.update(extra_config)
    return SamReport(tuple(rows), config)
