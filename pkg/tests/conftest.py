"""Shared fixtures: small hand-built OHLCV data used across test modules."""

from __future__ import annotations

import sys
from datetime import date, timedelta

import pytest

from weekcast.market_data import OhlcvBar, ValidatedSeries

CSV_HEADER = "Date,Open,High,Low,Close,Adj Close,Volume"


def pytest_terminal_summary(terminalreporter):
    """Echo acceptance verdict lines after the run, past stdout capture."""
    module = sys.modules.get("test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for line in verdicts:
            terminalreporter.write_line(line)


def weekday_sequence(start: date, count: int) -> list[date]:
    out = []
    day = start
    while len(out) < count:
        if day.weekday() < 5:
            out.append(day)
        day += timedelta(days=1)
    return out


def make_bar(day: date, open_=100.0, high=101.0, low=99.0, close=100.5, volume=1000.0) -> OhlcvBar:
    return OhlcvBar(date=day, open=open_, high=high, low=low, close=close, volume=volume)


def make_series(closes, start=date(2020, 1, 6), volumes=None) -> ValidatedSeries:
    """A valid series whose close path follows `closes`; open = previous close."""
    days = weekday_sequence(start, len(closes))
    bars = []
    prev_close = closes[0]
    for i, (day, close) in enumerate(zip(days, closes)):
        open_ = prev_close if i else close
        high = max(open_, close) * 1.01
        low = min(open_, close) * 0.99
        vol = volumes[i] if volumes is not None else 1000.0 + i
        bars.append(OhlcvBar(date=day, open=open_, high=high, low=low, close=close, volume=vol))
        prev_close = close
    return ValidatedSeries(bars=tuple(bars))


def csv_line(bar: OhlcvBar) -> str:
    return (
        f"{bar.date.isoformat()},{bar.open!r},{bar.high!r},{bar.low!r},"
        f"{bar.close!r},{bar.close!r},{bar.volume!r}"
    )


@pytest.fixture
def small_csv_text() -> str:
    series = make_series([100.0, 101.0, 99.5], start=date(2020, 1, 6))
    return CSV_HEADER + "\n" + "\n".join(csv_line(b) for b in series.bars) + "\n"
