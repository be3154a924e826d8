"""Unit tests for the statistical tests."""

import numpy as np
import pytest

from app.errors import StatTestError
from app.models import StatTest
from app.passage import hitting_pmf
from app.stats import (
    chi_square_gof,
    chi_square_two_sample,
    ks_test,
    ks_two_sample,
    merge_sparse_bins,
    slope_fit,
)


class TestVerdict:
    """The verdict is a pure function of decision value and threshold."""

    @pytest.mark.parametrize(
        "comparator,value,expected",
        [("gt", 0.5, True), ("gt", 0.1, False), ("ge", 0.1, True), ("le", 0.1, True), ("lt", 0.1, False)],
    )
    def test_comparators(self, comparator, value, expected):
        test = StatTest(kind="ks", statistic=0.0, decision_value=value, threshold=0.1, comparator=comparator)
        assert test.verdict is expected

    def test_verdict_is_serialized(self):
        test = StatTest(kind="ks", statistic=0.0, decision_value=0.0, threshold=0.1, comparator="le")
        assert test.model_dump()["verdict"] is True


class TestMergeBins:
    """Tests for merge_sparse_bins."""

    def test_merges_until_threshold(self):
        obs, exp = merge_sparse_bins(np.array([1, 2, 3, 10]), np.array([1.0, 2.0, 3.0, 10.0]), 5)
        assert obs.tolist() == [6, 10]
        assert exp.tolist() == [6.0, 10.0]

    def test_folds_remainder(self):
        obs, exp = merge_sparse_bins(np.array([10, 1]), np.array([10.0, 1.0]), 5)
        assert obs.tolist() == [11]
        assert exp.tolist() == [11.0]


class TestChiSquare:
    """Tests for the chi-square tests."""

    def test_perfect_fit_passes(self):
        test = chi_square_gof([250, 250, 500], [0.25, 0.25, 0.5])
        assert test.p_value == pytest.approx(1.0)
        assert test.verdict

    def test_bad_fit_fails(self):
        test = chi_square_gof([1000, 0], [0.5, 0.5])
        assert not test.verdict
        assert test.comparator == "gt"

    def test_gof_input_errors(self):
        with pytest.raises(StatTestError):
            chi_square_gof([1, 2], [0.5, 0.25, 0.25])
        with pytest.raises(StatTestError):
            chi_square_gof([0, 0], [0.5, 0.5])
        with pytest.raises(StatTestError):
            chi_square_gof([3, 1], [0.5, 0.5])  # one bin after merging

    def test_calibrated_on_exact_law(self):
        n = np.arange(1, 201)
        probs = hitting_pmf(2, n)
        probs = probs / probs.sum()
        rng = np.random.default_rng(11)
        rejected = 0
        for _ in range(200):
            draws = rng.choice(n, size=500, p=probs)
            observed = np.bincount(draws - 1, minlength=len(n))
            rejected += chi_square_gof(observed, probs, threshold=0.05).p_value < 0.05
        assert 0.01 <= rejected / 200 <= 0.12

    def test_two_sample_identical(self):
        sample = np.repeat([0, 1, 2], 100)
        test = chi_square_two_sample(sample, sample)
        assert test.p_value == pytest.approx(1.0)
        assert test.verdict

    def test_two_sample_different(self):
        a = np.repeat([0, 1], [900, 100])
        b = np.repeat([0, 1], [100, 900])
        assert not chi_square_two_sample(a, b).verdict

    def test_two_sample_vertices(self):
        a = np.array([[0, 0], [1, 0], [0, 1]] * 50)
        b = np.array([[0, 1], [0, 0], [1, 0]] * 50)
        test = chi_square_two_sample(a, b)
        assert test.verdict
        assert test.detail == "3 categories"

    def test_two_sample_empty(self):
        with pytest.raises(StatTestError):
            chi_square_two_sample([], [1, 2])

    def test_two_sample_single_category(self):
        with pytest.raises(StatTestError):
            chi_square_two_sample([1] * 20, [1] * 20)


class TestKolmogorovSmirnov:
    """Tests for the KS tests."""

    def test_uniform_sample(self):
        samples = np.random.default_rng(0).random(5000)
        test = ks_test(samples, lambda x: min(max(x, 0.0), 1.0), threshold=0.03)
        assert test.verdict
        assert test.comparator == "le"

    def test_wrong_reference(self):
        samples = np.random.default_rng(0).random(5000)
        test = ks_test(samples, lambda x: min(max(x, 0.0), 1.0) ** 2, threshold=0.03)
        assert not test.verdict

    def test_empty(self):
        with pytest.raises(StatTestError):
            ks_test([], lambda x: x)
        with pytest.raises(StatTestError):
            ks_two_sample([], [1.0])

    def test_two_sample_identical(self):
        sample = np.linspace(0, 1, 100)
        test = ks_two_sample(sample, sample)
        assert test.statistic == 0.0
        assert test.verdict


class TestSlopeFit:
    """Tests for slope_fit."""

    def test_exact_line(self):
        x = np.arange(5, dtype=float)
        test = slope_fit(x, 2 * x + 1, threshold=1.5, comparator="ge")
        assert test.statistic == pytest.approx(2.0)
        assert test.verdict

    def test_two_points_have_no_p_value(self):
        test = slope_fit([0.0, 1.0], [0.0, -1.0], threshold=0.0)
        assert test.p_value is None
        assert test.verdict

    def test_needs_distinct_x(self):
        with pytest.raises(StatTestError):
            slope_fit([1.0, 1.0], [0.0, 1.0], threshold=0.0)
