"""Unit tests for the lower-class series criterion."""

import numpy as np
import pytest

from app.errors import CriterionDegenerateError
from app.series import ExponentKind, SeriesCriterion, SeriesFamily, criterion_exponent, series_classify


class TestCriterionExponent:
    """Tests for criterion_exponent."""

    def test_zd_lower(self):
        assert criterion_exponent("zd_lower", K=3, d=1) == 0
        assert criterion_exponent("zd_lower", K=2, d=3) == 1
        assert criterion_exponent(ExponentKind.ZD_LOWER, K=4, d=2) == 4

    def test_comb_lower(self):
        assert criterion_exponent("comb_lower", K=4) == 2

    def test_single_walker(self):
        assert criterion_exponent("single_walker", d=4) == 2

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            criterion_exponent("upper")


class TestSeriesClassify:
    """Tests for series_classify."""

    def test_power_family_converges(self):
        assert series_classify(SeriesCriterion("power", 0.5, 1)) == "convergent"
        assert series_classify(SeriesCriterion(SeriesFamily.POWER, 0.01, 3)) == "convergent"

    def test_power_family_zero_parameter(self):
        assert series_classify(SeriesCriterion("power", 0.0, 2)) == "divergent"

    def test_logpower_family(self):
        assert series_classify(SeriesCriterion("logpower", 1.0, 1)) == "divergent"
        assert series_classify(SeriesCriterion("logpower", 2.0, 1)) == "convergent"
        assert series_classify(SeriesCriterion("logpower", 0.5, 3)) == "convergent"
        assert series_classify(SeriesCriterion("logpower", 0.5, 2)) == "divergent"

    def test_custom_family(self):
        criterion = SeriesCriterion("custom", 0.0, 2, func=lambda t: 1.0 / np.log(t + 1.0))
        assert series_classify(criterion) == "inconclusive"

    def test_custom_needs_function(self):
        with pytest.raises(ValueError):
            series_classify(SeriesCriterion("custom", 0.0, 2))

    def test_nonpositive_exponent(self):
        with pytest.raises(CriterionDegenerateError):
            series_classify(SeriesCriterion("logpower", 1.0, 0))
        with pytest.raises(CriterionDegenerateError):
            series_classify(SeriesCriterion("power", 1.0, -1))

    def test_increasing_function_rejected(self):
        with pytest.raises(ValueError):
            series_classify(SeriesCriterion("custom", 0.0, 1, func=lambda t: t))

    def test_negative_parameter_rejected(self):
        with pytest.raises(ValueError):
            SeriesCriterion("power", -1.0, 1)

    def test_family_is_coerced(self):
        assert SeriesCriterion("logpower", 1.0, 1).family is SeriesFamily.LOGPOWER

    def test_dyadic_values(self):
        criterion = SeriesCriterion("power", 1.0, 1)
        assert criterion.a_on_dyadics(np.array([1.0, 2.0])).tolist() == [0.5, 0.25]
