"""Experiment orchestration: data -> features -> models -> report files.

Every cell (model x seed) writes one JSON report and one CSV of raw
predictions. A run ends with summary.csv (per-model medians across seeds),
per-day RMSE tables for the CNN models, and run_meta.json. All files are
deterministic byte-for-byte for a given config and data.
"""

from __future__ import annotations

import json
import statistics
from pathlib import Path

from . import baselines, fixtures, market_data
from .config import CNN_MODEL_NAMES, ConfigError, ExperimentConfig
from .features import (
    FeatureError,
    FeatureTable,
    build_feature_table,
    fit_standardizer,
    apply_standardizer,
    split_by_date,
    split_by_week_count,
)
from .forecasters import (
    HORIZON,
    ModelKind,
    WalkForwardResult,
    default_training_config,
    export_walk_forward_csv,
    train_forecaster,
    walk_forward_evaluate,
)
from .market_data import WEEK_LENGTH, MarketDataError, ValidatedSeries
from .metrics import (
    ConfusionMatrix,
    build_forecast_report,
    classification_metrics,
    pearson_correlation,
    rmse,
)
from .nn import BACKEND
from .nn.training import TrainingDivergence, TrainingConfig

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_DATA_ERROR = 2
EXIT_TRAINING_ERROR = 3

MULTIVARIATE_N_IN = 10

_CLASSIFIER_METRIC_ORDER = (
    "test_accuracy", "test_recall", "test_specificity", "test_precision", "test_npv",
    "train_accuracy",
)


def load_series(cfg: ExperimentConfig) -> ValidatedSeries:
    """Materialize the input series from a CSV path or a synthetic generator."""
    if cfg.data_csv is not None:
        try:
            text = Path(cfg.data_csv).read_text(encoding="utf-8")
        except OSError as exc:
            raise MarketDataError(f"cannot read data file {cfg.data_csv}: {exc}") from None
        return market_data.parse_ohlcv_csv(text)

    spec = dict(cfg.synthetic)
    generator = spec["generator"]
    seed = spec.get("seed", fixtures.DEFAULT_SEED)
    if generator == "factor":
        from datetime import date

        start = date.fromisoformat(spec["start"]) if "start" in spec else fixtures.DEFAULT_START
        end = date.fromisoformat(spec["end"]) if "end" in spec else fixtures.DEFAULT_END
        return fixtures.factor_market_series(start=start, end=end, seed=seed)
    if "length" not in spec:
        raise ConfigError(f"data.synthetic.length is required for generator {generator!r}")
    return market_data.generate_synthetic_series(spec["length"], generator, seed)


def split_tables(cfg: ExperimentConfig, table: FeatureTable) -> tuple[FeatureTable, FeatureTable]:
    if cfg.split.by_date:
        train_table, test_table = split_by_date(table, cfg.split.boundary)
    else:
        train_table, test_table = split_by_week_count(
            table, cfg.split.train_weeks, cfg.split.test_weeks
        )
    if len(train_table) < WEEK_LENGTH:
        raise FeatureError(f"split leaves {len(train_table)} training rows; need a full week")
    if len(test_table) < WEEK_LENGTH:
        raise FeatureError(f"split leaves {len(test_table)} test rows; need a full week")
    return train_table, test_table


def _cnn_training_config(cfg: ExperimentConfig, kind: ModelKind, seed: int) -> TrainingConfig:
    base = default_training_config(kind, seed=seed)
    o = cfg.training
    return TrainingConfig(
        epochs=o.epochs if o.epochs is not None else base.epochs,
        batch_size=o.batch_size if o.batch_size is not None else base.batch_size,
        seed=seed,
        shuffle=base.shuffle,
    )


def _run_cnn_cell(cfg, name, seed, train_table, test_table, close_stats=None):
    kind = ModelKind(name)
    n_in = cfg.n_in if kind is ModelKind.UNIVARIATE else MULTIVARIATE_N_IN
    lr = cfg.training.lr if cfg.training.lr is not None else 0.001
    spec, params, trace = train_forecaster(
        kind, train_table, seed, n_in=n_in,
        config=_cnn_training_config(cfg, kind, seed), lr=lr,
    )
    result = walk_forward_evaluate(
        kind, spec, params, train_table, test_table, n_in=n_in,
        refit=cfg.refit, refit_seed=seed, lr=lr,
    )
    if close_stats is not None:
        mean, std = close_stats
        result = WalkForwardResult(
            predictions=result.predictions * std + mean,
            actuals=result.actuals * std + mean,
            history_lengths=result.history_lengths,
            dropped_test_rows=result.dropped_test_rows,
        )
    report = build_forecast_report(name, seed, result.predictions, result.actuals).as_dict()
    report["n_in"] = n_in
    report["final_train_loss"] = trace[-1]
    csv_text = export_walk_forward_csv(result)
    return report, csv_text


def _label_cell(name, seed, train_table, test_table):
    X_tr, y_tr = baselines.build_labeled_dataset(train_table)
    X_te, y_te = baselines.build_labeled_dataset(test_table)
    model = baselines.train_classifier(name, X_tr, y_tr, seed=seed)
    pred_tr = model.predict(X_tr)
    pred_te = model.predict(X_te)
    report = {
        "model": name,
        "seed": seed,
        "details": model.describe(),
        "train": classification_metrics(ConfusionMatrix.from_labels(y_tr, pred_tr)).as_dict(),
        "test": classification_metrics(ConfusionMatrix.from_labels(y_te, pred_te)).as_dict(),
    }
    lines = ["index,predicted,actual"]
    lines += [f"{i},{int(p)},{int(a)}" for i, (p, a) in enumerate(zip(pred_te, y_te))]
    return report, "\n".join(lines) + "\n"


def _linear_cell(seed, train_table, test_table):
    X_tr, y_tr = baselines.build_regression_dataset(train_table)
    X_te, y_te = baselines.build_regression_dataset(test_table)
    model = baselines.train_linear(X_tr, y_tr)
    pred_tr = model.predict(X_tr)
    pred_te = model.predict(X_te)
    report = {
        "model": "linear",
        "seed": seed,
        "details": model.describe(),
        "train": {"rmse": rmse(pred_tr, y_tr)},
        "test": {
            "rmse": rmse(pred_te, y_te),
            "pearson": pearson_correlation(pred_te, y_te),
        },
    }
    lines = ["index,predicted,actual"]
    lines += [f"{i},{float(p)!r},{float(a)!r}" for i, (p, a) in enumerate(zip(pred_te, y_te))]
    return report, "\n".join(lines) + "\n"


def _median(values) -> float | None:
    defined = [v for v in values if v is not None]
    if not defined:
        return None
    return float(statistics.median(defined))


def aggregate_reports(reports: list[dict], meta: dict) -> list[tuple[str, str, object]]:
    """summary.csv rows: (model, metric, median over seeds). Data facts first."""
    rows: list[tuple[str, str, object]] = [
        ("data", "train_weeks", meta["train_weeks"]),
        ("data", "test_weeks", meta["test_weeks"]),
        ("data", "train_rows", meta["train_rows"]),
        ("data", "test_rows", meta["test_rows"]),
        ("data", "skipped_null_rows", meta["skipped_null_rows"]),
    ]
    by_model: dict[str, list[dict]] = {}
    order: list[str] = []
    for rep in reports:
        name = rep["model"]
        if name not in by_model:
            by_model[name] = []
            order.append(name)
        by_model[name].append(rep)
    for name in order:
        group = by_model[name]
        if name in CNN_MODEL_NAMES:
            for metric in ("rmse_overall", "pearson_overall", "matched_overall"):
                rows.append((name, metric, _median([r[metric] for r in group])))
            for d in range(HORIZON):
                rows.append(
                    (name, f"rmse_day_{d + 1}", _median([r["rmse_by_day"][d] for r in group]))
                )
        elif name == "linear":
            rows.append((name, "test_rmse", _median([r["test"]["rmse"] for r in group])))
            rows.append((name, "train_rmse", _median([r["train"]["rmse"] for r in group])))
            rows.append((name, "test_pearson", _median([r["test"]["pearson"] for r in group])))
        else:
            for metric in _CLASSIFIER_METRIC_ORDER:
                side, _, key = metric.partition("_")
                rows.append((name, metric, _median([r[side][key] for r in group])))
    return rows


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def write_summary_csv(path: Path, rows) -> None:
    lines = ["model,metric,median"]
    lines += [f"{m},{k},{_format_value(v)}" for m, k, v in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_rmse_by_day_csv(path: Path, reports: list[dict]) -> None:
    """Plot data for one CNN model: per-day RMSE, median column then one per seed."""
    seeds = [r["seed"] for r in reports]
    header = ["day_of_week", "rmse_median"] + [f"seed_{s}" for s in seeds]
    lines = [",".join(header)]
    for d in range(HORIZON):
        per_seed = [r["rmse_by_day"][d] for r in reports]
        cells = [str(d + 1), _format_value(_median(per_seed))]
        cells += [_format_value(v) for v in per_seed]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(path: Path, obj: dict) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Execute every (model, seed) cell and write all artifacts.

    Returns the run metadata. Raises ConfigError, MarketDataError/FeatureError,
    or TrainingDivergence for the three failure classes.
    """
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    series = load_series(cfg)
    table = build_feature_table(series)
    train_table, test_table = split_tables(cfg, table)

    close_stats = None
    if cfg.standardize:
        stats = fit_standardizer(train_table)
        close_stats = (stats.means["close_perc"], stats.stds["close_perc"])
        train_table = apply_standardizer(train_table, stats)
        test_table = apply_standardizer(test_table, stats)

    out.mkdir(parents=True, exist_ok=True)
    meta = {
        "backend": BACKEND,
        "config_hash": cfg.hash,
        "models": list(cfg.models),
        "seeds": list(cfg.seeds),
        "train_rows": len(train_table),
        "test_rows": len(test_table),
        "train_weeks": len(train_table) // WEEK_LENGTH,
        "test_weeks": len(test_table) // WEEK_LENGTH,
        "skipped_null_rows": series.skipped_nulls,
        "standardize": cfg.standardize,
    }

    reports = []
    for name in cfg.models:
        for seed in cfg.seeds:
            if name in CNN_MODEL_NAMES:
                report, csv_text = _run_cnn_cell(
                    cfg, name, seed, train_table, test_table, close_stats
                )
            elif name == "linear":
                report, csv_text = _linear_cell(seed, train_table, test_table)
            else:
                report, csv_text = _label_cell(name, seed, train_table, test_table)
            report["config_hash"] = cfg.hash
            report["train_weeks"] = meta["train_weeks"]
            report["test_weeks"] = meta["test_weeks"]
            _write_json(out / f"report_{name}_{seed}.json", report)
            (out / f"report_{name}_{seed}.csv").write_text(csv_text, encoding="utf-8")
            reports.append(report)

    for name in cfg.models:
        if name in CNN_MODEL_NAMES:
            group = [r for r in reports if r["model"] == name]
            write_rmse_by_day_csv(out / f"rmse_by_day_{name}.csv", group)

    write_summary_csv(out / "summary.csv", aggregate_reports(reports, meta))
    _write_json(out / "run_meta.json", meta)
    return meta


def reaggregate(directory) -> dict:
    """Rebuild summary.csv (and per-day tables) from report files in a directory."""
    out = Path(directory)
    meta_path = out / "run_meta.json"
    if not meta_path.exists():
        raise MarketDataError(f"no run_meta.json in {out}; nothing to aggregate")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    reports = []
    for name in meta["models"]:
        for seed in meta["seeds"]:
            path = out / f"report_{name}_{seed}.json"
            if not path.exists():
                raise MarketDataError(f"missing report file {path.name} in {out}")
            reports.append(json.loads(path.read_text(encoding="utf-8")))
    for name in meta["models"]:
        if name in CNN_MODEL_NAMES:
            group = [r for r in reports if r["model"] == name]
            write_rmse_by_day_csv(out / f"rmse_by_day_{name}.csv", group)
    write_summary_csv(out / "summary.csv", aggregate_reports(reports, meta))
    return meta
