"""Config schema validation, typed parsing, and the canonical document hash."""

from __future__ import annotations

import json

import pytest

from weekcast.config import (
    ConfigError,
    ExperimentConfig,
    config_hash,
    example_config,
    load_config,
    parse_config,
)


def minimal_document(**overrides) -> dict:
    doc = {
        "data": {"synthetic": {"generator": "sine", "length": 40}},
        "split": {"train_weeks": 4, "test_weeks": 2},
        "models": ["univariate"],
        "seeds": [0],
    }
    doc.update(overrides)
    return doc


class TestSchema:
    def test_minimal_document_parses(self):
        cfg = parse_config(minimal_document())
        assert cfg.models == ("univariate",)
        assert cfg.seeds == (0,)
        assert cfg.synthetic == {"generator": "sine", "length": 40}
        assert cfg.data_csv is None

    def test_example_config_parses(self):
        cfg = parse_config(example_config())
        assert cfg.split.by_date
        assert cfg.n_in == 10
        assert set(cfg.models) == {"univariate", "multichannel", "multihead"}

    def test_defaults_applied(self):
        cfg = parse_config(minimal_document())
        assert cfg.n_in == 10
        assert cfg.output_dir == "reports"
        assert cfg.standardize is False
        assert cfg.refit is False
        assert cfg.training.epochs is None
        assert cfg.training.lr is None

    def test_missing_required_section(self):
        doc = minimal_document()
        del doc["split"]
        with pytest.raises(ConfigError, match="split"):
            parse_config(doc)

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="horizon"):
            parse_config(minimal_document(horizon=5))

    def test_unknown_nested_key(self):
        doc = minimal_document()
        doc["training"] = {"momentum": 0.9}
        with pytest.raises(ConfigError, match="momentum"):
            parse_config(doc)

    def test_data_requires_exactly_one_source(self):
        doc = minimal_document()
        doc["data"] = {}
        with pytest.raises(ConfigError, match="data"):
            parse_config(doc)
        doc["data"] = {"csv": "x.csv", "synthetic": {"generator": "factor"}}
        with pytest.raises(ConfigError, match="data"):
            parse_config(doc)

    def test_split_requires_one_rule(self):
        doc = minimal_document()
        doc["split"] = {"boundary": "2018-12-28", "train_weeks": 4, "test_weeks": 2}
        with pytest.raises(ConfigError, match="split"):
            parse_config(doc)
        doc["split"] = {"train_weeks": 4}
        with pytest.raises(ConfigError, match="split"):
            parse_config(doc)

    def test_unknown_model_name(self):
        with pytest.raises(ConfigError, match="models"):
            parse_config(minimal_document(models=["transformer"]))

    def test_duplicate_models_rejected(self):
        with pytest.raises(ConfigError, match="models"):
            parse_config(minimal_document(models=["univariate", "univariate"]))

    def test_empty_seeds_rejected(self):
        with pytest.raises(ConfigError, match="seeds"):
            parse_config(minimal_document(seeds=[]))

    def test_negative_seed_rejected(self):
        with pytest.raises(ConfigError, match="seeds"):
            parse_config(minimal_document(seeds=[-1]))

    def test_n_in_minimum(self):
        with pytest.raises(ConfigError, match="n_in"):
            parse_config(minimal_document(n_in=2))

    def test_bad_date_format(self):
        doc = minimal_document()
        doc["split"] = {"boundary": "28-12-2018"}
        with pytest.raises(ConfigError, match="boundary"):
            parse_config(doc)

    def test_well_formed_but_invalid_date(self):
        doc = minimal_document()
        doc["split"] = {"boundary": "2018-13-01"}
        with pytest.raises(ConfigError, match="split.boundary"):
            parse_config(doc)

    def test_invalid_synthetic_date(self):
        doc = minimal_document()
        doc["data"] = {"synthetic": {"generator": "factor", "start": "2015-02-30"}}
        with pytest.raises(ConfigError, match="data.synthetic.start"):
            parse_config(doc)

    def test_non_positive_lr_rejected(self):
        doc = minimal_document()
        doc["training"] = {"lr": 0.0}
        with pytest.raises(ConfigError, match="lr"):
            parse_config(doc)

    def test_error_names_location(self):
        with pytest.raises(ConfigError, match="config invalid at models/0"):
            parse_config(minimal_document(models=["nope"]))


class TestTypedAccess:
    def test_split_by_date(self):
        doc = minimal_document()
        doc["split"] = {"boundary": "2018-12-28"}
        cfg = parse_config(doc)
        assert cfg.split.by_date
        assert cfg.split.boundary.isoformat() == "2018-12-28"
        assert cfg.split.train_weeks is None

    def test_split_by_week_counts(self):
        cfg = parse_config(minimal_document())
        assert not cfg.split.by_date
        assert (cfg.split.train_weeks, cfg.split.test_weeks) == (4, 2)

    def test_training_overrides(self):
        doc = minimal_document()
        doc["training"] = {"epochs": 5, "batch_size": 8, "lr": 0.01}
        cfg = parse_config(doc)
        assert (cfg.training.epochs, cfg.training.batch_size, cfg.training.lr) == (5, 8, 0.01)

    def test_document_preserved_verbatim(self):
        doc = minimal_document(n_in=5)
        cfg = parse_config(doc)
        assert cfg.document is doc
        assert isinstance(cfg, ExperimentConfig)


class TestHash:
    def test_stable_across_key_order(self):
        a = {"b": 1, "a": {"y": 2, "x": 3}}
        b = {"a": {"x": 3, "y": 2}, "b": 1}
        assert config_hash(a) == config_hash(b)

    def test_sensitive_to_values(self):
        assert config_hash({"a": 1}) != config_hash({"a": 2})

    def test_insensitive_to_whitespace_in_source(self, tmp_path):
        doc = minimal_document()
        compact = tmp_path / "compact.json"
        spaced = tmp_path / "spaced.json"
        compact.write_text(json.dumps(doc, separators=(",", ":")))
        spaced.write_text(json.dumps(doc, indent=4))
        assert load_config(compact).hash == load_config(spaced).hash

    def test_hash_matches_document_hash(self):
        cfg = parse_config(minimal_document())
        assert cfg.hash == config_hash(cfg.document)
        assert len(cfg.hash) == 64


class TestLoad:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read config"):
            load_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_config(path)

    def test_non_object_root(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="root must be a JSON object"):
            load_config(path)

    def test_round_trip(self, tmp_path):
        path = tmp_path / "ok.json"
        path.write_text(json.dumps(minimal_document()))
        cfg = load_config(path)
        assert cfg.models == ("univariate",)
