"""End-to-end command-line behavior, including exit codes for each failure class."""

from __future__ import annotations

import json
from datetime import date

import pytest

from weekcast.cli import main
from weekcast.market_data import parse_ohlcv_csv

from conftest import CSV_HEADER, csv_line, make_series, weekday_sequence


@pytest.fixture
def data_csv(tmp_path):
    series = make_series([100.0 + 0.5 * i for i in range(12)], start=date(2020, 1, 6))
    path = tmp_path / "data.csv"
    path.write_text(CSV_HEADER + "\n" + "\n".join(csv_line(b) for b in series.bars) + "\n")
    return path


def run_config_document(out_dir) -> dict:
    return {
        "data": {"synthetic": {"generator": "sine", "length": 40, "seed": 5}},
        "split": {"train_weeks": 4, "test_weeks": 2},
        "models": ["univariate"],
        "seeds": [0],
        "n_in": 5,
        "training": {"epochs": 1},
        "output_dir": str(out_dir),
    }


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(run_config_document(tmp_path / "out")))
    return path


class TestIngest:
    def test_prints_row_count_first(self, data_csv, capsys):
        assert main(["ingest", str(data_csv)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "12 rows"
        assert lines[1] == "range: 2020-01-06 .. 2020-01-21"
        assert lines[2] == "skipped_null_rows: 0"
        assert lines[3] == "weeks: 2 (dropped 2 trailing rows)"

    def test_header_only_file(self, tmp_path, capsys):
        path = tmp_path / "empty.csv"
        path.write_text(CSV_HEADER + "\n")
        assert main(["ingest", str(path)]) == 0
        assert capsys.readouterr().out.splitlines()[0] == "0 rows"

    def test_null_rows_reported(self, data_csv, capsys):
        text = data_csv.read_text().splitlines()
        text.insert(3, "2020-01-22,null,null,null,null,null,null")
        data_csv.write_text("\n".join(text) + "\n")
        assert main(["ingest", str(data_csv)]) == 0
        assert "skipped_null_rows: 1" in capsys.readouterr().out

    def test_malformed_csv_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("Date,Open\n")
        assert main(["ingest", str(path)]) == 2
        assert "data error" in capsys.readouterr().err

    def test_missing_file_exits_2(self, tmp_path, capsys):
        assert main(["ingest", str(tmp_path / "absent.csv")]) == 2
        assert "data error" in capsys.readouterr().err


class TestFeatures:
    def test_stdout_has_one_row_per_day_after_first(self, data_csv, capsys):
        assert main(["features", str(data_csv)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("date,month,day_month,day_week,close_perc")
        assert len(lines) == 1 + 11  # 12 input rows -> 11 derived rows

    def test_out_flag_writes_file(self, data_csv, tmp_path, capsys):
        target = tmp_path / "features.csv"
        assert main(["features", str(data_csv), "--out", str(target)]) == 0
        assert "wrote" in capsys.readouterr().out
        assert len(target.read_text().splitlines()) == 12


class TestRun:
    def test_positional_config(self, config_path, tmp_path, capsys):
        assert main(["run", str(config_path)]) == 0
        out = capsys.readouterr().out
        assert "train_weeks: 4  test_weeks: 2" in out
        assert (tmp_path / "out" / "summary.csv").exists()
        assert (tmp_path / "out" / "report_univariate_0.json").exists()

    def test_config_flag(self, config_path, tmp_path):
        assert main(["run", "--config", str(config_path)]) == 0
        assert (tmp_path / "out" / "run_meta.json").exists()

    def test_both_config_styles_exit_1(self, config_path, capsys):
        assert main(["run", str(config_path), "--config", str(config_path)]) == 1
        assert "config error" in capsys.readouterr().err

    def test_no_config_exits_1(self, capsys):
        assert main(["run"]) == 1
        assert "config error" in capsys.readouterr().err

    def test_seed_override(self, config_path, tmp_path):
        assert main(["run", str(config_path), "--seed", "7"]) == 0
        out = tmp_path / "out"
        assert (out / "report_univariate_7.json").exists()
        assert not (out / "report_univariate_0.json").exists()

    def test_models_override(self, config_path, tmp_path):
        assert main(["run", str(config_path), "--models", "univariate,linear"]) == 0
        assert (tmp_path / "out" / "report_linear_0.json").exists()

    def test_out_override_changes_hash(self, config_path, tmp_path):
        other = tmp_path / "elsewhere"
        assert main(["run", str(config_path), "--out", str(other)]) == 0
        meta = json.loads((other / "run_meta.json").read_text())
        document = json.loads(config_path.read_text())
        document["output_dir"] = str(other)
        from weekcast.config import config_hash

        assert meta["config_hash"] == config_hash(document)

    def test_invalid_model_override_exits_1(self, config_path, capsys):
        assert main(["run", str(config_path), "--models", "transformer"]) == 1
        assert "config error" in capsys.readouterr().err

    def test_invalid_schema_exits_1(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"data": {}}))
        assert main(["run", str(path)]) == 1
        assert "config error" in capsys.readouterr().err

    def test_unparseable_json_exits_1(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{")
        assert main(["run", str(path)]) == 1
        assert "not valid JSON" in capsys.readouterr().err

    def test_missing_config_file_exits_1(self, tmp_path):
        assert main(["run", str(tmp_path / "absent.json")]) == 1

    def test_missing_data_csv_exits_2(self, tmp_path, capsys):
        document = run_config_document(tmp_path / "out")
        document["data"] = {"csv": str(tmp_path / "absent.csv")}
        path = tmp_path / "config.json"
        path.write_text(json.dumps(document))
        assert main(["run", str(path)]) == 2
        assert "data error" in capsys.readouterr().err

    @pytest.mark.filterwarnings("ignore:invalid value encountered:RuntimeWarning")
    @pytest.mark.filterwarnings("ignore:overflow encountered:RuntimeWarning")
    def test_overflowing_series_exits_3(self, tmp_path, capsys):
        days = weekday_sequence(date(2024, 1, 1), 21)
        prices = [1e-290, 1e300] + [100.0 + i for i in range(19)]
        rows = [
            f"{d.isoformat()},{p!r},{p!r},{p!r},{p!r},{p!r},1000.0"
            for d, p in zip(days, prices)
        ]
        csv_path = tmp_path / "overflow.csv"
        csv_path.write_text(CSV_HEADER + "\n" + "\n".join(rows) + "\n")
        document = run_config_document(tmp_path / "out")
        document["data"] = {"csv": str(csv_path)}
        document["split"] = {"train_weeks": 3, "test_weeks": 1}
        path = tmp_path / "config.json"
        path.write_text(json.dumps(document))
        assert main(["run", str(path)]) == 3
        assert "training diverged" in capsys.readouterr().err


class TestReport:
    def test_reaggregates_run_directory(self, config_path, tmp_path, capsys):
        assert main(["run", str(config_path)]) == 0
        capsys.readouterr()
        assert main(["report", str(tmp_path / "out")]) == 0
        assert "re-aggregated 1 models over 1 seeds" in capsys.readouterr().out

    def test_empty_directory_exits_2(self, tmp_path, capsys):
        assert main(["report", str(tmp_path)]) == 2
        assert "no run_meta.json" in capsys.readouterr().err


class TestSynth:
    def test_factor_output_round_trips_through_ingest(self, tmp_path, capsys):
        out = tmp_path / "synth.csv"
        code = main([
            "synth", str(out), "--start", "2015-01-05", "--end", "2015-02-27",
        ])
        assert code == 0
        assert "wrote 40 rows" in capsys.readouterr().out
        series = parse_ohlcv_csv(out.read_text())
        assert len(series) == 40
        assert main(["ingest", str(out)]) == 0

    def test_seed_changes_factor_output(self, tmp_path):
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        args = ["--start", "2015-01-05", "--end", "2015-01-30"]
        main(["synth", str(a), "--seed", "1", *args])
        main(["synth", str(b), "--seed", "2", *args])
        assert a.read_text() != b.read_text()

    def test_pattern_generator(self, tmp_path):
        out = tmp_path / "sine.csv"
        assert main(["synth", str(out), "--generator", "sine", "--length", "15"]) == 0
        assert len(parse_ohlcv_csv(out.read_text())) == 15

    def test_pattern_generator_requires_length(self, tmp_path, capsys):
        assert main(["synth", str(tmp_path / "x.csv"), "--generator", "sine"]) == 1
        assert "--length is required" in capsys.readouterr().err
