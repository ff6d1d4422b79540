"""Bound formulas, the dichotomy-count oracle, and the Rademacher estimator.

Reference values are frozen from an independent 40-digit mpmath
recomputation of each closed form; the N(n, d) table comes from the exact
integer recursion for counts of homogeneous linear dichotomies.
"""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from samkit import (
    BoundRequest,
    DataError,
    DegeneracyWarning,
    LabeledDataset,
    ParameterError,
    SizeError,
    cover_bound,
    enumerate_dichotomies,
    evaluate_bound,
    hoeffding_term,
    log_growth_cover,
    massart_bound,
    rademacher_monte_carlo,
    vc_bound,
)

MASSART_100_LN6 = 1.1932403007707211
MASSART_TERM1 = 1.0708529592366803
MASSART_1E8_LN2 = 0.00078843103046019903
EIGHT_SQRT_LN2 = 6.6604368892615821
VC_500_2 = 0.19396516610731044
VC_2000_2 = 0.10388414593612936
COVER_500_1 = 0.07068049429336209
COVER_500_8 = 0.22025434157162043
HOEFFDING_200 = 0.086540919130114267
HOEFFDING_50 = 0.17308183826022853

# N(n, d) for n = 1..8 (rows) and d = 1..4 (columns): exact counts of
# homogeneous linear dichotomies, 2 * sum_{k < d} C(n-1, k).
GROWTH_TABLE = np.array(
    [
        [2, 2, 2, 2],
        [2, 4, 4, 4],
        [2, 6, 8, 8],
        [2, 8, 14, 16],
        [2, 10, 22, 30],
        [2, 12, 32, 52],
        [2, 14, 44, 84],
        [2, 16, 58, 128],
    ]
)


class TestGrowthFunction:
    def test_small_table(self):
        for n in range(1, 9):
            for d in range(1, 5):
                log_n = log_growth_cover(n, d).log_n_dichotomies
                assert math.exp(log_n) == pytest.approx(GROWTH_TABLE[n - 1, d - 1], rel=1e-12)

    def test_shattering_regime_is_exact(self):
        assert log_growth_cover(2, 3).log_n_dichotomies == 2 * math.log(2.0)
        assert log_growth_cover(5, 5).log_n_dichotomies == 5 * math.log(2.0)

    def test_single_dimension(self):
        # d = 1 leaves only the two constant-threshold sign patterns.
        assert log_growth_cover(500, 1).log_n_dichotomies == pytest.approx(
            math.log(2.0), abs=1e-15
        )

    def test_large_n_stays_finite(self):
        log_n = log_growth_cover(10**6, 8).log_n_dichotomies
        assert math.isfinite(log_n)
        assert log_n < 10**6 * math.log(2.0)
        assert log_n == pytest.approx(7 * math.log(10.0**6) - math.log(5040) + math.log(2), rel=1e-3)

    @given(n=st.integers(1, 32), d=st.integers(1, 32))
    @settings(max_examples=200)
    def test_ceiling_with_equality_iff_shattered(self, n, d):
        log_n = log_growth_cover(n, d).log_n_dichotomies
        cap = n * math.log(2.0)
        assert log_n <= cap + 1e-12
        assert (abs(log_n - cap) < 1e-12) == (n <= d)

    def test_domain(self):
        with pytest.raises(ParameterError):
            log_growth_cover(0, 3)
        with pytest.raises(ParameterError):
            log_growth_cover(5, 0)


class TestMassartBound:
    def test_frozen_value(self):
        res = massart_bound(100, math.log(6.0), 0.05)
        assert res.delta_n == pytest.approx(MASSART_100_LN6, abs=1e-12)
        assert res.vacuous

    def test_term_decomposition(self):
        res = massart_bound(100, math.log(6.0), 0.05)
        term2 = hoeffding_term(100, 0.05)
        assert res.delta_n - term2 == pytest.approx(MASSART_TERM1, abs=1e-12)
        assert res.delta_n - term2 == pytest.approx(1.0709, abs=1e-4)
        assert term2 == pytest.approx(0.1224, abs=1e-4)

    def test_huge_sample_is_tight(self):
        res = massart_bound(10**8, math.log(2.0), 0.05)
        assert res.delta_n == pytest.approx(MASSART_1E8_LN2, abs=1e-15)
        assert res.delta_n < 0.001
        assert not res.vacuous

    def test_shattered_class_is_hopeless(self):
        res = massart_bound(1000, 1000 * math.log(2.0), 0.05)
        assert res.delta_n >= EIGHT_SQRT_LN2
        assert res.vacuous

    def test_dim_not_echoed(self):
        assert massart_bound(100, 1.0, 0.05).dim is None

    def test_domain(self):
        with pytest.raises(ParameterError):
            massart_bound(100, -0.5, 0.05)
        with pytest.raises(ParameterError):
            massart_bound(100, 1.0, 0.0)
        with pytest.raises(ParameterError):
            massart_bound(100, 1.0, 1.0)


class TestVcBound:
    def test_frozen_value(self):
        res = vc_bound(500, 2, 0.05)
        assert res.delta_n == pytest.approx(VC_500_2, abs=1e-12)
        assert res.delta_n == pytest.approx(0.1940, abs=1e-4)
        assert res.dim == 1

    def test_looser_than_function_counting(self):
        assert vc_bound(500, 2, 0.05).delta_n > cover_bound(500, 1, 0.05).delta_n

    def test_decreases_with_n(self):
        assert vc_bound(2000, 2, 0.05).delta_n == pytest.approx(VC_2000_2, abs=1e-12)
        assert vc_bound(2000, 2, 0.05).delta_n < vc_bound(500, 2, 0.05).delta_n

    def test_needs_n_at_least_h(self):
        with pytest.raises(ParameterError):
            vc_bound(1, 2, 0.05)
        assert vc_bound(2, 2, 0.05).delta_n > 0


class TestCoverBound:
    def test_frozen_value(self):
        res = cover_bound(500, 1, 0.05)
        assert res.delta_n == pytest.approx(COVER_500_1, abs=1e-12)
        assert res.delta_n == pytest.approx(0.0707, abs=1e-4)
        assert res.delta_n < 0.10

    def test_one_dimension_reduces_to_offset_hoeffding(self):
        expected = math.sqrt((2.0 + math.log(1.0 / 0.05)) / (2.0 * 500))
        assert cover_bound(500, 1, 0.05).delta_n == expected

    def test_grows_with_dimension(self):
        res8 = cover_bound(500, 8, 0.05)
        assert res8.delta_n == pytest.approx(COVER_500_8, abs=1e-12)
        assert res8.delta_n > cover_bound(500, 1, 0.05).delta_n


class TestHoeffdingTerm:
    def test_frozen_value(self):
        assert hoeffding_term(200, 0.05) == pytest.approx(HOEFFDING_200, abs=1e-15)
        assert hoeffding_term(200, 0.05) == pytest.approx(0.08654, abs=1e-5)

    def test_certain_coverage_costs_nothing(self):
        assert hoeffding_term(200, 1.0) == 0.0

    def test_quarter_sample_doubles_the_term(self):
        assert hoeffding_term(50, 0.05) == pytest.approx(HOEFFDING_50, abs=1e-15)
        assert hoeffding_term(50, 0.05) == pytest.approx(
            2.0 * hoeffding_term(200, 0.05), abs=1e-15
        )

    def test_domain(self):
        with pytest.raises(ParameterError):
            hoeffding_term(200, 0.0)
        with pytest.raises(ParameterError):
            hoeffding_term(200, 1.5)


class TestEvaluateBound:
    @pytest.mark.parametrize("method", ["massart", "vc", "cover"])
    def test_strictly_decreasing_in_n(self, method):
        values = [
            evaluate_bound(BoundRequest(method, n, 2, 0.05)).delta_n
            for n in (50, 100, 400, 1600, 6400)
        ]
        assert all(a > b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("method", ["massart", "vc", "cover"])
    def test_strictly_decreasing_in_delta(self, method):
        loose = evaluate_bound(BoundRequest(method, 500, 2, 0.2)).delta_n
        tight = evaluate_bound(BoundRequest(method, 500, 2, 0.01)).delta_n
        assert loose < tight

    def test_massart_echoes_dimension(self):
        res = evaluate_bound(BoundRequest("massart", 100, 3, 0.05))
        assert res.dim == 3 and res.method == "massart"

    def test_purity(self):
        a = evaluate_bound(BoundRequest("cover", 777, 4, 0.07))
        b = evaluate_bound(BoundRequest("cover", 777, 4, 0.07))
        assert a == b

    def test_json_record_keys(self):
        record = evaluate_bound(BoundRequest("vc", 500, 1, 0.05)).as_dict()
        assert list(record) == ["method", "n", "dim", "delta", "delta_n", "vacuous"]

    def test_request_validation(self):
        with pytest.raises(ParameterError):
            BoundRequest("cover", 0, 1, 0.05)
        with pytest.raises(ParameterError):
            BoundRequest("cover", 10, 0, 0.05)
        with pytest.raises(ParameterError):
            BoundRequest("splines", 10, 1, 0.05)
        with pytest.raises(ParameterError):
            BoundRequest("cover", 10, 1, 1.0)


class TestEnumerateDichotomies:
    def test_three_points_in_the_plane(self):
        rng = np.random.default_rng(101)
        for _ in range(100):
            pts = rng.standard_normal((3, 2))
            assert enumerate_dichotomies(pts) == 6

    def test_two_points(self):
        rng = np.random.default_rng(102)
        assert enumerate_dichotomies(rng.standard_normal((2, 2))) == 4

    def test_four_points_in_the_plane(self):
        rng = np.random.default_rng(103)
        assert enumerate_dichotomies(rng.standard_normal((4, 2))) == 8

    def test_affine_mode_lifts_dimension(self):
        rng = np.random.default_rng(104)
        # Two distinct reals admit all four threshold labelings.
        assert enumerate_dichotomies(rng.standard_normal((2, 1)), homogeneous=False) == 4

    def test_matches_formula_on_random_sets(self):
        rng = np.random.default_rng(105)
        for n, d in [(4, 2), (5, 3), (6, 3), (8, 3), (4, 4), (7, 2)]:
            for _ in range(3):
                pts = rng.standard_normal((n, d))
                expected = round(math.exp(log_growth_cover(n, d).log_n_dichotomies))
                assert enumerate_dichotomies(pts) == expected

    def test_too_many_points(self):
        with pytest.raises(SizeError):
            enumerate_dichotomies(np.zeros((17, 2)) + np.eye(17, 2))

    def test_degenerate_points_warn_but_count(self):
        pts = np.array([[1.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
        with pytest.warns(DegeneracyWarning):
            count = enumerate_dichotomies(pts)
        assert isinstance(count, int) and count % 2 == 0

    def test_origin_warns(self):
        pts = np.array([[0.0, 0.0], [1.0, 1.0]])
        with pytest.warns(DegeneracyWarning):
            enumerate_dichotomies(pts)

    def test_validation(self):
        with pytest.raises(ParameterError):
            enumerate_dichotomies(np.zeros((0, 2)))
        with pytest.raises(DataError):
            enumerate_dichotomies(np.array([[np.nan, 1.0]]))


class TestRademacherMonteCarlo:
    def test_bounded_by_growth_cap(self):
        rng = np.random.default_rng(42)
        data = LabeledDataset(
            rng.standard_normal((50, 2)), np.where(rng.random(50) < 0.5, 1, -1)
        )
        est = rademacher_monte_carlo(data, trials=200, seed=7)
        cap = 2.0 * math.sqrt(log_growth_cover(50, 2).log_n_dichotomies / 50)
        assert est.estimate <= cap + 3.0 * est.stderr

    def test_single_point_in_unit_interval(self):
        data = LabeledDataset(np.array([[0.7]]), np.array([1]))
        est = rademacher_monte_carlo(data, trials=30, seed=0)
        assert 0.0 <= est.estimate <= 1.0

    def test_decreases_with_sample_size(self):
        rng = np.random.default_rng(11)
        small = LabeledDataset(
            rng.standard_normal((50, 2)), np.where(rng.random(50) < 0.5, 1, -1)
        )
        big = LabeledDataset(
            rng.standard_normal((200, 2)), np.where(rng.random(200) < 0.5, 1, -1)
        )
        est_small = rademacher_monte_carlo(small, trials=500, seed=1)
        est_big = rademacher_monte_carlo(big, trials=500, seed=2)
        pooled = math.hypot(est_small.stderr, est_big.stderr)
        assert est_small.estimate - est_big.estimate > 2.0 * pooled

    def test_empty_dataset_rejected(self):
        data = LabeledDataset(np.zeros((0, 2)), np.zeros(0, dtype=int))
        with pytest.raises(DataError):
            rademacher_monte_carlo(data, trials=10)

    def test_trials_validated(self):
        data = LabeledDataset(np.array([[0.5]]), np.array([1]))
        with pytest.raises(ParameterError):
            rademacher_monte_carlo(data, trials=0)
