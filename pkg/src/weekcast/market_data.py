"""Daily OHLCV ingestion: CSV parsing, validation, 5-day week chunking, synthetic series."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

CSV_HEADER = ("Date", "Open", "High", "Low", "Close", "Adj Close", "Volume")

WEEK_LENGTH = 5

SYNTHETIC_PATTERNS = ("constant", "linear", "sine", "random_walk")


class MarketDataError(ValueError):
    """Raised for malformed input files or OHLCV invariant violations."""


@dataclass(frozen=True)
class OhlcvBar:
    """One trading day of index data."""

    date: date
    open: float
    high: float
    low: float
    close: float
    volume: float

    def validate(self) -> None:
        for name in ("open", "high", "low", "close"):
            if not getattr(self, name) > 0:
                raise MarketDataError(f"{self.date}: {name} must be strictly positive")
        if self.volume < 0:
            raise MarketDataError(f"{self.date}: volume must be non-negative")
        if not (self.low <= self.open <= self.high):
            raise MarketDataError(f"{self.date}: open outside [low, high]")
        if not (self.low <= self.close <= self.high):
            raise MarketDataError(f"{self.date}: close outside [low, high]")


@dataclass(frozen=True)
class ValidatedSeries:
    """Bars sorted strictly ascending by date, each passing OhlcvBar validation.

    ``skipped_nulls`` counts source rows dropped because a field held the
    literal string ``null`` (Yahoo emits these for exchange holidays).
    """

    bars: tuple[OhlcvBar, ...]
    skipped_nulls: int = 0

    def __len__(self) -> int:
        return len(self.bars)

    def closes(self) -> np.ndarray:
        return np.array([b.close for b in self.bars], dtype=np.float64)


@dataclass(frozen=True)
class TradingWeek:
    """Five consecutive daily records treated as one forecast unit."""

    rows: tuple
    index: int

    def __post_init__(self):
        if len(self.rows) != WEEK_LENGTH:
            raise MarketDataError(
                f"week {self.index}: expected {WEEK_LENGTH} rows, got {len(self.rows)}"
            )


def parse_ohlcv_csv(text: str) -> ValidatedSeries:
    """Parse a Yahoo Finance daily-history CSV document.

    Rows containing the literal ``null`` in any field are skipped and counted.
    Remaining rows are sorted ascending by date and validated; duplicate dates
    and OHLCV invariant violations raise MarketDataError naming the date.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MarketDataError("empty document: missing header row") from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise MarketDataError(
            f"malformed header: expected {','.join(CSV_HEADER)!r}, got {','.join(header)!r}"
        )

    bars = []
    skipped = 0
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(CSV_HEADER):
            raise MarketDataError(f"line {lineno}: expected {len(CSV_HEADER)} fields, got {len(row)}")
        if any(f.strip() == "null" for f in row):
            skipped += 1
            continue
        try:
            day = date.fromisoformat(row[0].strip())
        except ValueError:
            raise MarketDataError(f"line {lineno}: unparseable date {row[0]!r}") from None
        try:
            o, h, lo, c, _adj, v = (float(f) for f in row[1:])
        except ValueError:
            raise MarketDataError(f"line {lineno} ({day}): unparseable number") from None
        if not all(math.isfinite(x) for x in (o, h, lo, c, v)):
            raise MarketDataError(f"line {lineno} ({day}): non-finite value")
        bars.append(OhlcvBar(day, o, h, lo, c, v))

    bars.sort(key=lambda b: b.date)
    for prev, curr in zip(bars, bars[1:]):
        if prev.date == curr.date:
            raise MarketDataError(f"duplicate date {curr.date}")
    for bar in bars:
        bar.validate()
    return ValidatedSeries(tuple(bars), skipped_nulls=skipped)


def serialize_ohlcv_csv(series: ValidatedSeries) -> str:
    """Re-emit a series in the source CSV format.

    The unused Adj Close column is filled with the close value; parse then
    serialize round-trips bar-for-bar.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for b in series.bars:
        writer.writerow(
            [b.date.isoformat(), repr(float(b.open)), repr(float(b.high)), repr(float(b.low)),
             repr(float(b.close)), repr(float(b.close)), repr(float(b.volume))]
        )
    return out.getvalue()


def chunk_into_weeks(rows) -> tuple[list[TradingWeek], int]:
    """Group ordered records into non-overlapping 5-day blocks.

    Returns (weeks, dropped) where dropped counts trailing records that did
    not fill a final block. Chunking is positional, not calendar-based.
    """
    if isinstance(rows, ValidatedSeries):
        rows = rows.bars
    rows = tuple(rows)
    n_weeks = len(rows) // WEEK_LENGTH
    weeks = [
        TradingWeek(rows[i * WEEK_LENGTH : (i + 1) * WEEK_LENGTH], index=i)
        for i in range(n_weeks)
    ]
    return weeks, len(rows) - n_weeks * WEEK_LENGTH


def next_weekday(day: date) -> date:
    day = day + timedelta(days=1)
    while day.weekday() >= 5:
        day += timedelta(days=1)
    return day


def weekday_range(start: date, end: date) -> list[date]:
    """All Monday-to-Friday dates in [start, end]."""
    days = []
    day = start if start.weekday() < 5 else next_weekday(start)
    while day <= end:
        days.append(day)
        day = next_weekday(day)
    return days


def generate_synthetic_series(
    length: int,
    pattern: str,
    seed: int,
    start: date = date(2015, 1, 5),
    base_price: float = 100.0,
) -> ValidatedSeries:
    """Deterministic synthetic daily series for tests and demos.

    Close values follow the requested pattern; high/low form a small envelope
    around open and close, and volume stays positive, so every bar passes
    validation. Dates advance over weekdays only.
    """
    if length < 0:
        raise ValueError("length must be >= 0")
    if pattern not in SYNTHETIC_PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}; expected one of {SYNTHETIC_PATTERNS}")

    t = np.arange(length, dtype=np.float64)
    rng = np.random.default_rng(seed)
    if pattern == "constant":
        closes = np.full(length, base_price)
    elif pattern == "linear":
        closes = base_price + t
    elif pattern == "sine":
        closes = base_price + 10.0 * np.sin(2.0 * np.pi * t / 20.0)
    else:  # random_walk
        steps = rng.normal(0.0, 0.01, size=length)
        closes = base_price * np.cumprod(1.0 + steps) if length else np.empty(0)

    bars = []
    day = start if start.weekday() < 5 else next_weekday(start)
    prev_close = closes[0] if length else base_price
    for i in range(length):
        close = float(closes[i])
        open_ = float(prev_close)
        hi = max(open_, close) * 1.005
        lo = min(open_, close) * 0.995
        volume = 1000.0 + 10.0 * i
        if pattern == "random_walk":
            volume *= float(1.0 + 0.1 * abs(rng.normal()))
        bars.append(OhlcvBar(day, open_, hi, lo, close, volume))
        prev_close = close
        day = next_weekday(day)
    series = ValidatedSeries(tuple(bars))
    for bar in bars:
        bar.validate()
    return series
