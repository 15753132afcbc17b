"""Supervised framing, the three CNN forecaster architectures, and walk-forward evaluation."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .features import FeatureTable
from .market_data import WEEK_LENGTH, chunk_into_weeks
from .nn import network
from .nn.network import LayerSpec, NetworkSpec, conv1d, dense, flatten, maxpool1d, relu, seq_shape
from .nn.training import TrainingConfig, fit

HORIZON = WEEK_LENGTH  # five forecast days per week

# Input channel / head order for the multivariate models.
CHANNEL_ORDER = ("close_perc", "open_perc", "high_perc", "low_perc")


class ModelKind(Enum):
    UNIVARIATE = "univariate"
    MULTICHANNEL = "multichannel"
    MULTIHEAD = "multihead"


class FramingError(ValueError):
    pass


@dataclass(frozen=True)
class SupervisedDataset:
    """Sliding-window samples: per-head inputs plus the next week of close_perc."""

    inputs: tuple
    targets: np.ndarray

    def __post_init__(self):
        counts = {x.shape[0] for x in self.inputs} | {self.targets.shape[0]}
        if len(counts) != 1:
            raise FramingError(f"heads and targets disagree on sample count: {counts}")

    @property
    def n_samples(self) -> int:
        return self.targets.shape[0]


def _windows(values: np.ndarray, n_in: int, n_samples: int) -> np.ndarray:
    return np.lib.stride_tricks.sliding_window_view(values, n_in)[:n_samples].copy()


def frame_univariate(close_perc: np.ndarray, n_in: int) -> SupervisedDataset:
    """Stride-1 windows of n_in values, each targeting the following 5 values."""
    values = np.asarray(close_perc, dtype=np.float64)
    n_samples = values.size - n_in - (HORIZON - 1)
    if n_samples < 1:
        raise FramingError(
            f"series of length {values.size} too short for n_in={n_in} plus a {HORIZON}-day target"
        )
    inputs = _windows(values, n_in, n_samples)[:, :, None]
    targets = _windows(values[n_in:], HORIZON, n_samples)
    return SupervisedDataset((inputs,), targets)


def _aligned_channels(series_by_name: dict) -> list[np.ndarray]:
    arrays = [np.asarray(series_by_name[name], dtype=np.float64) for name in CHANNEL_ORDER]
    lengths = {a.size for a in arrays}
    if len(lengths) != 1:
        raise FramingError(f"misaligned series lengths: {sorted(lengths)}")
    return arrays


def frame_multichannel(series_by_name: dict, n_in: int = 10) -> SupervisedDataset:
    """One head of shape [samples, n_in, 4]; channel order close, open, high, low."""
    arrays = _aligned_channels(series_by_name)
    close = arrays[0]
    n_samples = close.size - n_in - (HORIZON - 1)
    if n_samples < 1:
        raise FramingError(f"series of length {close.size} too short for n_in={n_in}")
    stacked = np.stack([_windows(a, n_in, n_samples) for a in arrays], axis=2)
    targets = _windows(close[n_in:], HORIZON, n_samples)
    return SupervisedDataset((stacked,), targets)


def frame_multihead(series_by_name: dict, n_in: int = 10) -> SupervisedDataset:
    """Four single-channel heads with identical sample counts; targets from close_perc."""
    arrays = _aligned_channels(series_by_name)
    close = arrays[0]
    n_samples = close.size - n_in - (HORIZON - 1)
    if n_samples < 1:
        raise FramingError(f"series of length {close.size} too short for n_in={n_in}")
    heads = tuple(_windows(a, n_in, n_samples)[:, :, None] for a in arrays)
    targets = _windows(close[n_in:], HORIZON, n_samples)
    return SupervisedDataset(heads, targets)


def _seq_stack(n_in: int, channels: int, layers) -> tuple[LayerSpec, ...]:
    """Drop any max-pool whose incoming length is <= 1 (degenerate pooling guard)."""
    kept = []
    length = n_in
    for layer in layers:
        if layer.kind == "maxpool1d" and length <= 1:
            continue
        kept.append(layer)
        if layer.kind == "conv1d":
            length = length - layer.kernel_size + 1
        elif layer.kind == "maxpool1d":
            length = length // layer.pool_size
    return tuple(kept)


def build_univariate_model(n_in: int) -> NetworkSpec:
    """Light single-channel net: conv(16, k3), pool, then a small dense interpreter."""
    head = _seq_stack(n_in, 1, [conv1d(16, 3), relu(), maxpool1d(2), flatten()])
    return NetworkSpec(
        input_shapes=(seq_shape(n_in, 1),),
        heads=(head,),
        tail=(dense(10), relu(), dense(HORIZON)),
    )


def build_multichannel_model(n_in: int = 10) -> NetworkSpec:
    """Four input channels through a deeper conv stack and a 100-node interpreter."""
    head = _seq_stack(
        n_in, 4,
        [conv1d(32, 3), relu(), conv1d(32, 3), relu(), maxpool1d(2),
         conv1d(16, 3), relu(), maxpool1d(2), flatten()],
    )
    return NetworkSpec(
        input_shapes=(seq_shape(n_in, 4),),
        heads=(head,),
        tail=(dense(100), relu(), dense(HORIZON)),
    )


def build_multihead_model(n_in: int = 10) -> NetworkSpec:
    """One conv sub-model per input series, merged by concatenation."""
    head = _seq_stack(
        n_in, 1,
        [conv1d(32, 3), relu(), conv1d(32, 3), relu(), maxpool1d(2), flatten()],
    )
    return NetworkSpec(
        input_shapes=tuple(seq_shape(n_in, 1) for _ in CHANNEL_ORDER),
        heads=tuple(head for _ in CHANNEL_ORDER),
        tail=(dense(200), relu(), dense(100), relu(), dense(HORIZON)),
    )


def build_model(kind: ModelKind, n_in: int) -> NetworkSpec:
    if kind is ModelKind.UNIVARIATE:
        return build_univariate_model(n_in)
    if kind is ModelKind.MULTICHANNEL:
        return build_multichannel_model(n_in)
    return build_multihead_model(n_in)


def default_training_config(kind: ModelKind, seed: int = 0) -> TrainingConfig:
    """Published schedules: light net trains briefly, the larger nets longer.

    The multihead schedule follows the multichannel one.
    """
    if kind is ModelKind.UNIVARIATE:
        return TrainingConfig(epochs=20, batch_size=4, seed=seed)
    return TrainingConfig(epochs=70, batch_size=16, seed=seed)


def frame_table(kind: ModelKind, table: FeatureTable, n_in: int) -> SupervisedDataset:
    if kind is ModelKind.UNIVARIATE:
        return frame_univariate(table.column("close_perc"), n_in)
    series = {name: table.column(name) for name in CHANNEL_ORDER}
    if kind is ModelKind.MULTICHANNEL:
        return frame_multichannel(series, n_in)
    return frame_multihead(series, n_in)


def train_forecaster(
    kind: ModelKind,
    train_table: FeatureTable,
    seed: int,
    n_in: int = 10,
    config: TrainingConfig | None = None,
    lr: float = 0.001,
):
    """Build, initialize, and fit one forecaster; returns (spec, params, loss trace)."""
    spec = build_model(kind, n_in)
    dataset = frame_table(kind, train_table, n_in)
    if config is None:
        config = default_training_config(kind, seed=seed)
    params = network.init_params(spec, seed)
    params, trace = fit(spec, params, dataset, config, loss="mse", lr=lr)
    return spec, params, trace


@dataclass(frozen=True)
class WalkForwardResult:
    """Per-week predictions and actuals, in test order."""

    predictions: np.ndarray  # [weeks, 5]
    actuals: np.ndarray      # [weeks, 5]
    history_lengths: tuple[int, ...]
    dropped_test_rows: int = 0


def walk_forward_evaluate(
    kind: ModelKind,
    spec: NetworkSpec,
    params: dict,
    train_table: FeatureTable,
    test_table: FeatureTable,
    n_in: int = 10,
    refit: bool = False,
    refit_seed: int = 0,
    lr: float = 0.001,
) -> WalkForwardResult:
    """Predict each test week from the last n_in days of history, then append
    that week's actual rows to history.

    The model is fit once beforehand and its parameters stay frozen unless
    ``refit`` is set, in which case it is re-fit from scratch on the grown
    history before every week.
    """
    from .nn.training import predict_single

    names = CHANNEL_ORDER if kind is not ModelKind.UNIVARIATE else ("close_perc",)
    history = {name: list(train_table.column(name)) for name in names}
    if len(history["close_perc"]) < n_in:
        raise FramingError(
            f"training history of {len(history['close_perc'])} rows is shorter than n_in={n_in}"
        )
    weeks, dropped = chunk_into_weeks(test_table.rows)
    if not weeks:
        raise FramingError("test table holds no full 5-day week")

    predictions = []
    actuals = []
    history_lengths = []
    for week in weeks:
        if refit:
            merged = FeatureTable(tuple(train_table.rows) + tuple(
                r for w in weeks[: week.index] for r in w.rows
            ))
            spec, params, _ = train_forecaster(kind, merged, refit_seed, n_in=n_in, lr=lr)
        history_lengths.append(len(history["close_perc"]))
        windows = {name: np.array(history[name][-n_in:], dtype=np.float64) for name in names}
        if kind is ModelKind.UNIVARIATE:
            heads = [windows["close_perc"][:, None]]
        elif kind is ModelKind.MULTICHANNEL:
            heads = [np.stack([windows[name] for name in CHANNEL_ORDER], axis=1)]
        else:
            heads = [windows[name][:, None] for name in CHANNEL_ORDER]
        predictions.append(predict_single(spec, params, heads))
        actuals.append([row.close_perc for row in week.rows])
        for name in names:
            history[name].extend(getattr(row, name) for row in week.rows)

    return WalkForwardResult(
        predictions=np.array(predictions, dtype=np.float64),
        actuals=np.array(actuals, dtype=np.float64),
        history_lengths=tuple(history_lengths),
        dropped_test_rows=dropped,
    )


def export_walk_forward_csv(result: WalkForwardResult) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["week_index", "day_of_week", "predicted", "actual"])
    for w in range(result.predictions.shape[0]):
        for d in range(HORIZON):
            writer.writerow(
                [w, d + 1, repr(float(result.predictions[w, d])), repr(float(result.actuals[w, d]))]
            )
    return out.getvalue()
