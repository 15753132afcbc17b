"""Classification and forecast-quality metrics.

Classification metrics are reported in percent. A metric whose denominator is
empty is reported as undefined (None) rather than silently coerced to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .market_data import WEEK_LENGTH


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @classmethod
    def from_labels(cls, actual, predicted) -> "ConfusionMatrix":
        a = np.asarray(actual)
        p = np.asarray(predicted)
        if a.shape != p.shape:
            raise MetricsError(f"label shapes differ: {a.shape} vs {p.shape}")
        bad = set(np.unique(a)) | set(np.unique(p))
        if not bad <= {0, 1}:
            raise MetricsError(f"labels must be 0/1, got {sorted(bad)}")
        return cls(
            tp=int(np.sum((a == 1) & (p == 1))),
            fp=int(np.sum((a == 0) & (p == 1))),
            tn=int(np.sum((a == 0) & (p == 0))),
            fn=int(np.sum((a == 1) & (p == 0))),
        )

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class ClassificationMetrics:
    """Percent-valued summary; None marks a metric with an empty denominator."""

    recall: float | None
    specificity: float | None
    precision: float | None
    npv: float | None
    accuracy: float | None

    @property
    def undefined(self) -> tuple[str, ...]:
        return tuple(
            name for name in ("recall", "specificity", "precision", "npv", "accuracy")
            if getattr(self, name) is None
        )

    def as_dict(self) -> dict:
        return {
            "recall": self.recall,
            "specificity": self.specificity,
            "precision": self.precision,
            "npv": self.npv,
            "accuracy": self.accuracy,
            "undefined": list(self.undefined),
        }


def _ratio(num: int, den: int) -> float | None:
    return 100.0 * num / den if den else None


def classification_metrics(cm: ConfusionMatrix) -> ClassificationMetrics:
    return ClassificationMetrics(
        recall=_ratio(cm.tp, cm.tp + cm.fn),
        specificity=_ratio(cm.tn, cm.tn + cm.fp),
        precision=_ratio(cm.tp, cm.tp + cm.fp),
        npv=_ratio(cm.tn, cm.tn + cm.fn),
        accuracy=_ratio(cm.tp + cm.tn, cm.total),
    )


def _paired(predicted, actual) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(predicted, dtype=np.float64)
    a = np.asarray(actual, dtype=np.float64)
    if p.shape != a.shape:
        raise MetricsError(f"prediction/actual shapes differ: {p.shape} vs {a.shape}")
    if p.size == 0:
        raise MetricsError("empty prediction arrays")
    return p, a


def rmse(predicted, actual) -> float:
    p, a = _paired(predicted, actual)
    return float(np.sqrt(np.mean((p - a) ** 2)))


def rmse_by_day(predicted, actual) -> np.ndarray:
    """Column-wise RMSE of [weeks, 5] arrays: one value per weekday position."""
    p, a = _paired(predicted, actual)
    if p.ndim != 2 or p.shape[1] != WEEK_LENGTH:
        raise MetricsError(f"expected [weeks, {WEEK_LENGTH}] arrays, got shape {p.shape}")
    return np.sqrt(np.mean((p - a) ** 2, axis=0))


def pearson_correlation(x, y) -> float | None:
    """Sample Pearson r; None when either side has zero variance."""
    p, a = _paired(x, y)
    p = p.ravel()
    a = a.ravel()
    dp = p - p.mean()
    da = a - a.mean()
    denom = np.sqrt(np.sum(dp * dp) * np.sum(da * da))
    if denom == 0.0:
        return None
    return float(np.sum(dp * da) / denom)


def _signs(values: np.ndarray) -> np.ndarray:
    # zero counts as an up day
    return np.where(values >= 0.0, 1, -1)


def matched_cases(predicted, actual) -> float:
    """Percent of days whose predicted and actual directions agree."""
    p, a = _paired(predicted, actual)
    return float(100.0 * np.mean(_signs(p) == _signs(a)))


def matched_cases_by_day(predicted, actual) -> np.ndarray:
    p, a = _paired(predicted, actual)
    if p.ndim != 2 or p.shape[1] != WEEK_LENGTH:
        raise MetricsError(f"expected [weeks, {WEEK_LENGTH}] arrays, got shape {p.shape}")
    return 100.0 * np.mean(_signs(p) == _signs(a), axis=0)


@dataclass(frozen=True)
class ForecastReport:
    """Walk-forward evaluation summary for one fitted forecaster."""

    model: str
    seed: int
    n_weeks: int
    rmse_overall: float
    rmse_by_day: tuple[float, ...]
    pearson_overall: float | None
    matched_overall: float
    matched_by_day: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "seed": self.seed,
            "n_weeks": self.n_weeks,
            "rmse_overall": self.rmse_overall,
            "rmse_by_day": list(self.rmse_by_day),
            "pearson_overall": self.pearson_overall,
            "matched_overall": self.matched_overall,
            "matched_by_day": list(self.matched_by_day),
        }


def build_forecast_report(model: str, seed: int, predictions, actuals) -> ForecastReport:
    p, a = _paired(predictions, actuals)
    return ForecastReport(
        model=model,
        seed=seed,
        n_weeks=int(p.shape[0]),
        rmse_overall=rmse(p, a),
        rmse_by_day=tuple(float(v) for v in rmse_by_day(p, a)),
        pearson_overall=pearson_correlation(p, a),
        matched_overall=matched_cases(p, a),
        matched_by_day=tuple(float(v) for v in matched_cases_by_day(p, a)),
    )
