"""Metric implementations against brute-force oracles and edge cases."""

from __future__ import annotations

import math

import numpy as np
import pytest

from weekcast.metrics import (
    ClassificationMetrics,
    ConfusionMatrix,
    MetricsError,
    build_forecast_report,
    classification_metrics,
    matched_cases,
    matched_cases_by_day,
    pearson_correlation,
    rmse,
    rmse_by_day,
)


class TestConfusionMatrix:
    def test_from_labels(self):
        actual = [1, 1, 0, 0, 1, 0]
        predicted = [1, 0, 0, 1, 1, 0]
        cm = ConfusionMatrix.from_labels(actual, predicted)
        assert (cm.tp, cm.fp, cm.tn, cm.fn) == (2, 1, 2, 1)
        assert cm.total == 6

    def test_shape_mismatch(self):
        with pytest.raises(MetricsError, match="shapes differ"):
            ConfusionMatrix.from_labels([0, 1], [0, 1, 1])

    def test_non_binary_labels(self):
        with pytest.raises(MetricsError, match="0/1"):
            ConfusionMatrix.from_labels([0, 2], [0, 1])


class TestClassificationMetrics:
    def test_hand_computed_percentages(self):
        cm = ConfusionMatrix(tp=30, fp=10, tn=40, fn=20)
        m = classification_metrics(cm)
        assert m.recall == pytest.approx(60.0)        # 30 / 50
        assert m.specificity == pytest.approx(80.0)   # 40 / 50
        assert m.precision == pytest.approx(75.0)     # 30 / 40
        assert m.npv == pytest.approx(100.0 * 40 / 60)
        assert m.accuracy == pytest.approx(70.0)      # 70 / 100
        assert m.undefined == ()

    def test_no_positive_actuals_leaves_recall_undefined(self):
        m = classification_metrics(ConfusionMatrix(tp=0, fp=0, tn=5, fn=0))
        assert m.recall is None
        assert m.precision is None
        assert m.specificity == pytest.approx(100.0)
        assert set(m.undefined) == {"recall", "precision"}

    def test_all_undefined_on_empty_matrix(self):
        m = classification_metrics(ConfusionMatrix(0, 0, 0, 0))
        assert m.undefined == ("recall", "specificity", "precision", "npv", "accuracy")

    def test_as_dict_round_trip(self):
        m = classification_metrics(ConfusionMatrix(tp=1, fp=0, tn=0, fn=0))
        d = m.as_dict()
        assert d["recall"] == 100.0
        assert d["specificity"] is None
        assert "specificity" in d["undefined"]
        assert isinstance(m, ClassificationMetrics)

    def test_random_instances_match_brute_force(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = int(rng.integers(1, 50))
            a = rng.integers(0, 2, size=n)
            p = rng.integers(0, 2, size=n)
            m = classification_metrics(ConfusionMatrix.from_labels(a, p))
            tp = sum(1 for x, q in zip(a, p) if x == 1 and q == 1)
            fn = sum(1 for x, q in zip(a, p) if x == 1 and q == 0)
            if tp + fn:
                assert m.recall == pytest.approx(100.0 * tp / (tp + fn), rel=1e-12)
            else:
                assert m.recall is None
            correct = sum(1 for x, q in zip(a, p) if x == q)
            assert m.accuracy == pytest.approx(100.0 * correct / n, rel=1e-12)


class TestRmse:
    def test_hand_value(self):
        assert rmse([1.0, 2.0, 3.0], [0.0, 2.0, 5.0]) == pytest.approx(math.sqrt(5.0 / 3.0))

    def test_zero_on_equal(self):
        x = np.arange(6.0).reshape(2, 3)
        assert rmse(x, x) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(MetricsError, match="empty"):
            rmse([], [])

    def test_shape_mismatch(self):
        with pytest.raises(MetricsError, match="shapes differ"):
            rmse(np.zeros((2, 5)), np.zeros((3, 5)))

    def test_by_day_columns(self):
        p = np.array([[1.0, 0.0, 0.0, 0.0, 2.0], [3.0, 0.0, 0.0, 0.0, 2.0]])
        a = np.zeros((2, 5))
        by_day = rmse_by_day(p, a)
        assert by_day.shape == (5,)
        assert by_day[0] == pytest.approx(math.sqrt(5.0))
        assert by_day[1] == 0.0
        assert by_day[4] == pytest.approx(2.0)

    def test_by_day_requires_week_shape(self):
        with pytest.raises(MetricsError, match=r"\[weeks, 5\]"):
            rmse_by_day(np.zeros((2, 4)), np.zeros((2, 4)))

    def test_by_day_consistent_with_overall(self):
        rng = np.random.default_rng(1)
        p = rng.normal(size=(10, 5))
        a = rng.normal(size=(10, 5))
        by_day = rmse_by_day(p, a)
        assert rmse(p, a) == pytest.approx(math.sqrt(np.mean(by_day**2)))


class TestPearson:
    def test_matches_numpy_corrcoef(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = rng.normal(size=30)
            y = 0.4 * x + rng.normal(size=30)
            assert pearson_correlation(x, y) == pytest.approx(
                float(np.corrcoef(x, y)[0, 1]), rel=1e-12
            )

    def test_perfect_correlation(self):
        x = np.arange(10.0)
        assert pearson_correlation(x, 3.0 * x + 1.0) == pytest.approx(1.0)
        assert pearson_correlation(x, -x) == pytest.approx(-1.0)

    def test_constant_series_is_undefined(self):
        assert pearson_correlation(np.ones(5), np.arange(5.0)) is None
        assert pearson_correlation(np.arange(5.0), np.zeros(5)) is None

    def test_flattens_week_matrices(self):
        rng = np.random.default_rng(5)
        p = rng.normal(size=(4, 5))
        a = rng.normal(size=(4, 5))
        assert pearson_correlation(p, a) == pytest.approx(
            pearson_correlation(p.ravel(), a.ravel())
        )


class TestMatchedCases:
    def test_hand_value(self):
        p = [0.5, -0.2, 0.1, -0.4]
        a = [1.0, 0.3, -0.2, -0.5]
        # agreements: day1 (+,+), day4 (-,-) -> 50%
        assert matched_cases(p, a) == pytest.approx(50.0)

    def test_zero_counts_as_up(self):
        assert matched_cases([0.0], [0.4]) == pytest.approx(100.0)
        assert matched_cases([0.0], [-0.4]) == pytest.approx(0.0)
        assert matched_cases([0.0], [0.0]) == pytest.approx(100.0)

    def test_by_day(self):
        p = np.array([[1.0, -1.0, 1.0, 1.0, -1.0], [1.0, 1.0, -1.0, 1.0, -1.0]])
        a = np.array([[2.0, 1.0, 1.0, -1.0, -3.0], [0.5, 1.0, -2.0, -1.0, -1.0]])
        by_day = matched_cases_by_day(p, a)
        assert np.allclose(by_day, [100.0, 50.0, 100.0, 0.0, 100.0])
        assert matched_cases(p, a) == pytest.approx(float(np.mean(by_day)))

    def test_brute_force_random(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            n = int(rng.integers(1, 40))
            p = rng.normal(size=n)
            a = rng.normal(size=n)
            agree = sum(
                1 for x, q in zip(p, a)
                if (x >= 0 and q >= 0) or (x < 0 and q < 0)
            )
            assert matched_cases(p, a) == pytest.approx(100.0 * agree / n, rel=1e-12)


class TestForecastReport:
    def test_fields_consistent_with_metric_functions(self):
        rng = np.random.default_rng(9)
        p = rng.normal(size=(8, 5))
        a = rng.normal(size=(8, 5))
        report = build_forecast_report("univariate", 3, p, a)
        assert report.model == "univariate"
        assert report.seed == 3
        assert report.n_weeks == 8
        assert report.rmse_overall == pytest.approx(rmse(p, a))
        assert report.rmse_by_day == pytest.approx(tuple(rmse_by_day(p, a)))
        assert report.pearson_overall == pytest.approx(pearson_correlation(p, a))
        assert report.matched_overall == pytest.approx(matched_cases(p, a))

    def test_as_dict_is_json_safe(self):
        import json

        rng = np.random.default_rng(2)
        p = rng.normal(size=(3, 5))
        report = build_forecast_report("multihead", 0, p, p)
        d = report.as_dict()
        assert d["rmse_overall"] == 0.0
        # Identical arrays have zero variance in neither; r is defined.
        assert d["pearson_overall"] == pytest.approx(1.0)
        assert json.dumps(d)  # plain types only
