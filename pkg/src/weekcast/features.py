"""Per-day derived variables: calendar codes plus day-over-day percent changes."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, replace
from datetime import date

import numpy as np

from .market_data import WEEK_LENGTH, OhlcvBar, ValidatedSeries

PERCENT_FEATURES = (
    "close_perc", "open_perc", "high_perc", "low_perc", "vol_perc", "range_perc",
)
CALENDAR_FEATURES = ("month", "day_month", "day_week")
FEATURE_NAMES = CALENDAR_FEATURES + PERCENT_FEATURES

CSV_COLUMNS = ("date",) + FEATURE_NAMES + ("flags",)


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class CalendarFeatures:
    month: int      # 1..12
    day_month: int  # 1..31
    day_week: int   # 1..5, position inside the chunked week


@dataclass(frozen=True)
class PercentFeatures:
    close_perc: float
    open_perc: float
    high_perc: float
    low_perc: float
    vol_perc: float
    range_perc: float
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class FeatureRow:
    """The nine derived variables for one trading day.

    ``flags`` names percent features whose previous-day denominator was zero
    (volume or range only); those values are stored as 0.0.
    """

    date: date
    month: int
    day_month: int
    day_week: int
    close_perc: float
    open_perc: float
    high_perc: float
    low_perc: float
    vol_perc: float
    range_perc: float
    flags: tuple[str, ...] = ()

    def values(self) -> tuple[float, ...]:
        return tuple(float(getattr(self, name)) for name in FEATURE_NAMES)


class FeatureTable:
    """Ordered FeatureRows with array-style column access."""

    def __init__(self, rows):
        self.rows = tuple(rows)
        for prev, curr in zip(self.rows, self.rows[1:]):
            if prev.date >= curr.date:
                raise FeatureError(f"rows out of order at {curr.date}")

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, key):
        if isinstance(key, slice):
            return FeatureTable(self.rows[key])
        return self.rows[key]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=np.float64)

    def matrix(self) -> np.ndarray:
        """[rows, 9] array in FEATURE_NAMES order."""
        return np.array([r.values() for r in self.rows], dtype=np.float64)

    def dates(self) -> list[date]:
        return [r.date for r in self.rows]


def percent_change(prev_value: float, curr_value: float) -> float:
    return 100.0 * (curr_value - prev_value) / prev_value


def derive_percent_features(prev: OhlcvBar, curr: OhlcvBar) -> PercentFeatures:
    """Six percent changes between two successive bars.

    Prices are strictly positive so only volume and range can have a zero
    previous-day denominator; those features become 0.0 and are flagged.
    """
    if prev.date >= curr.date:
        raise FeatureError(f"bars out of order: {prev.date} !< {curr.date}")
    flags = []
    values = {
        "close_perc": percent_change(prev.close, curr.close),
        "open_perc": percent_change(prev.open, curr.open),
        "high_perc": percent_change(prev.high, curr.high),
        "low_perc": percent_change(prev.low, curr.low),
    }
    if prev.volume == 0.0:
        values["vol_perc"] = 0.0
        flags.append("vol_perc")
    else:
        values["vol_perc"] = percent_change(prev.volume, curr.volume)
    prev_range = prev.high - prev.low
    curr_range = curr.high - curr.low
    if prev_range == 0.0:
        values["range_perc"] = 0.0
        flags.append("range_perc")
    else:
        values["range_perc"] = percent_change(prev_range, curr_range)
    return PercentFeatures(flags=tuple(flags), **values)


def derive_calendar_features(position_in_week: int, day: date) -> CalendarFeatures:
    """Month and day-of-month from the date; day_week from week position (1..5)."""
    if not 1 <= position_in_week <= WEEK_LENGTH:
        raise FeatureError(f"position_in_week {position_in_week} outside [1, {WEEK_LENGTH}]")
    return CalendarFeatures(month=day.month, day_month=day.day, day_week=position_in_week)


def build_feature_table(series: ValidatedSeries) -> FeatureTable:
    """Derive one FeatureRow per day after the first.

    The first day has no predecessor and is dropped, so the output holds
    len(series) - 1 rows. day_week reflects position within sequential 5-day
    chunks of the derived rows, not the calendar.
    """
    if len(series) < 2:
        raise FeatureError(f"need at least 2 bars, got {len(series)}")
    rows = []
    for i, (prev, curr) in enumerate(zip(series.bars, series.bars[1:])):
        perc = derive_percent_features(prev, curr)
        cal = derive_calendar_features(i % WEEK_LENGTH + 1, curr.date)
        rows.append(
            FeatureRow(
                date=curr.date,
                month=cal.month,
                day_month=cal.day_month,
                day_week=cal.day_week,
                close_perc=perc.close_perc,
                open_perc=perc.open_perc,
                high_perc=perc.high_perc,
                low_perc=perc.low_perc,
                vol_perc=perc.vol_perc,
                range_perc=perc.range_perc,
                flags=perc.flags,
            )
        )
    return FeatureTable(rows)


def split_by_date(table: FeatureTable, boundary: date) -> tuple[FeatureTable, FeatureTable]:
    """Rows dated on or before the boundary go to the first table."""
    first = [r for r in table.rows if r.date <= boundary]
    second = [r for r in table.rows if r.date > boundary]
    return FeatureTable(first), FeatureTable(second)


def split_by_week_count(
    table: FeatureTable, train_weeks: int, test_weeks: int
) -> tuple[FeatureTable, FeatureTable]:
    """First train_weeks*5 rows for training, next test_weeks*5 for test."""
    need = (train_weeks + test_weeks) * WEEK_LENGTH
    if train_weeks < 1 or test_weeks < 1:
        raise FeatureError("train_weeks and test_weeks must each be >= 1")
    if len(table) < need:
        raise FeatureError(f"need {need} rows for the requested split, got {len(table)}")
    cut = train_weeks * WEEK_LENGTH
    return table[:cut], table[cut:need]


@dataclass(frozen=True)
class StandardizerStats:
    """Per-feature mean and population standard deviation, fitted on training rows."""

    means: dict[str, float]
    stds: dict[str, float]

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(self.means)


def fit_standardizer(table: FeatureTable, feature_names=PERCENT_FEATURES) -> StandardizerStats:
    means: dict[str, float] = {}
    stds: dict[str, float] = {}
    for name in feature_names:
        col = table.column(name)
        mean = float(np.mean(col))
        std = float(np.std(col))  # population convention
        if std == 0.0:
            raise FeatureError(f"feature {name!r} is constant; cannot standardize")
        means[name] = mean
        stds[name] = std
    return StandardizerStats(means, stds)


def _transform(table: FeatureTable, stats: StandardizerStats, invert: bool) -> FeatureTable:
    out = []
    for row in table.rows:
        updates = {}
        for name in stats.feature_names:
            x = getattr(row, name)
            if invert:
                updates[name] = x * stats.stds[name] + stats.means[name]
            else:
                updates[name] = (x - stats.means[name]) / stats.stds[name]
        out.append(replace(row, **updates))
    return FeatureTable(out)


def apply_standardizer(table: FeatureTable, stats: StandardizerStats) -> FeatureTable:
    """z-score the selected features; calendar codes pass through untouched."""
    return _transform(table, stats, invert=False)


def invert_standardizer(table: FeatureTable, stats: StandardizerStats) -> FeatureTable:
    return _transform(table, stats, invert=True)


def export_feature_csv(table: FeatureTable) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in table.rows:
        writer.writerow(
            [r.date.isoformat(), r.month, r.day_month, r.day_week]
            + [repr(float(getattr(r, name))) for name in PERCENT_FEATURES]
            + [";".join(r.flags)]
        )
    return out.getvalue()
