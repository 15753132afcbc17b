"""weekcast: weekly index-move forecasting from daily OHLCV data.

Pipeline: ingest Yahoo-style daily CSV, derive day-over-day percent
features, train 1-D CNN multi-step forecasters and classical baselines,
and evaluate weekly forecasts with walk-forward validation.
"""

__version__ = "0.1.0"
