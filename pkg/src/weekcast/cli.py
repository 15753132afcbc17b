"""Command-line entry points.

Subcommands: ingest (validate a CSV and print stats), features (emit the
derived feature table), run (full config-driven experiment), report
(re-aggregate an output directory), synth (write a synthetic OHLCV CSV).

Exit codes: 0 success, 1 config error, 2 data error, 3 training divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import date
from pathlib import Path

from . import fixtures, market_data, runner
from .baselines import BaselineError
from .config import ConfigError, load_config, parse_config
from .features import FeatureError, build_feature_table, export_feature_csv
from .forecasters import FramingError
from .market_data import MarketDataError
from .metrics import MetricsError
from .nn.training import TrainingDivergence

_DATA_ERRORS = (MarketDataError, FeatureError, FramingError, BaselineError, MetricsError)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weekcast",
        description="Weekly market-movement forecasting experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="validate an OHLCV CSV and print stats")
    p_ingest.add_argument("csv", type=Path)

    p_features = sub.add_parser("features", help="derive the per-day feature table")
    p_features.add_argument("csv", type=Path)
    p_features.add_argument("--out", type=Path, default=None, help="write CSV here instead of stdout")

    p_run = sub.add_parser("run", help="run a config-driven experiment")
    p_run.add_argument("config_path", nargs="?", type=Path, default=None)
    p_run.add_argument("--config", dest="config_flag", type=Path, default=None)
    p_run.add_argument("--out", type=Path, default=None, help="override output directory")
    p_run.add_argument("--seed", type=int, default=None, help="replace the config's seed list")
    p_run.add_argument("--models", type=str, default=None, help="comma-separated model override")

    p_report = sub.add_parser("report", help="re-aggregate summaries in an output directory")
    p_report.add_argument("directory", type=Path)

    p_synth = sub.add_parser("synth", help="write a synthetic OHLCV CSV")
    p_synth.add_argument("out", type=Path)
    p_synth.add_argument(
        "--generator", choices=("factor",) + market_data.SYNTHETIC_PATTERNS, default="factor"
    )
    p_synth.add_argument("--seed", type=int, default=fixtures.DEFAULT_SEED)
    p_synth.add_argument("--length", type=int, default=None, help="rows (pattern generators)")
    p_synth.add_argument("--start", type=str, default=None, help="YYYY-MM-DD (factor generator)")
    p_synth.add_argument("--end", type=str, default=None, help="YYYY-MM-DD (factor generator)")
    return parser


def _cmd_ingest(args) -> int:
    series = market_data.parse_ohlcv_csv(args.csv.read_text(encoding="utf-8"))
    weeks, dropped = market_data.chunk_into_weeks(series)
    print(f"{len(series.bars)} rows")
    if series.bars:
        print(f"range: {series.bars[0].date.isoformat()} .. {series.bars[-1].date.isoformat()}")
    print(f"skipped_null_rows: {series.skipped_nulls}")
    print(f"weeks: {len(weeks)} (dropped {dropped} trailing rows)")
    return runner.EXIT_OK


def _cmd_features(args) -> int:
    series = market_data.parse_ohlcv_csv(args.csv.read_text(encoding="utf-8"))
    text = export_feature_csv(build_feature_table(series))
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")
        print(f"wrote {args.out}")
    return runner.EXIT_OK


def _cmd_run(args) -> int:
    paths = [p for p in (args.config_path, args.config_flag) if p is not None]
    if len(paths) != 1:
        raise ConfigError("pass the config file either positionally or via --config, not both")
    cfg = load_config(paths[0])
    document = dict(cfg.document)
    if args.seed is not None:
        document["seeds"] = [args.seed]
    if args.models is not None:
        document["models"] = [m.strip() for m in args.models.split(",") if m.strip()]
    if args.out is not None:
        document["output_dir"] = str(args.out)
    cfg = parse_config(document)
    meta = runner.run_experiment(cfg)
    print(f"wrote reports to {cfg.output_dir}")
    print(f"train_weeks: {meta['train_weeks']}  test_weeks: {meta['test_weeks']}")
    print(f"backend: {meta['backend']}  config_hash: {meta['config_hash'][:12]}")
    return runner.EXIT_OK


def _cmd_report(args) -> int:
    meta = runner.reaggregate(args.directory)
    print(f"re-aggregated {len(meta['models'])} models over {len(meta['seeds'])} seeds")
    return runner.EXIT_OK


def _cmd_synth(args) -> int:
    if args.generator == "factor":
        kwargs = {}
        if args.start is not None:
            kwargs["start"] = date.fromisoformat(args.start)
        if args.end is not None:
            kwargs["end"] = date.fromisoformat(args.end)
        series = fixtures.factor_market_series(seed=args.seed, **kwargs)
    else:
        if args.length is None:
            raise ConfigError(f"--length is required for the {args.generator!r} generator")
        series = market_data.generate_synthetic_series(args.length, args.generator, args.seed)
    args.out.write_text(market_data.serialize_ohlcv_csv(series), encoding="utf-8")
    print(f"wrote {len(series.bars)} rows to {args.out}")
    return runner.EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "ingest": _cmd_ingest,
        "features": _cmd_features,
        "run": _cmd_run,
        "report": _cmd_report,
        "synth": _cmd_synth,
    }
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return runner.EXIT_CONFIG_ERROR
    except _DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return runner.EXIT_DATA_ERROR
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return runner.EXIT_DATA_ERROR
    except TrainingDivergence as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return runner.EXIT_TRAINING_ERROR
    except json.JSONDecodeError as exc:
        print(f"data error: invalid JSON: {exc}", file=sys.stderr)
        return runner.EXIT_DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
