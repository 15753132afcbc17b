"""Experiment configuration: JSON documents checked against a published schema.

Unknown keys are rejected outright so a typo cannot silently change a run.
The canonical hash of the effective document is recorded in every report.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from datetime import date

import jsonschema

CNN_MODEL_NAMES = ("univariate", "multichannel", "multihead")
BASELINE_MODEL_NAMES = (
    "logistic", "knn", "tree", "bagging", "random_forest", "adaboost", "ann", "linear",
)
MODEL_NAMES = CNN_MODEL_NAMES + BASELINE_MODEL_NAMES

SYNTHETIC_GENERATORS = ("factor", "constant", "linear", "sine", "random_walk")

_DATE_PATTERN = r"^\d{4}-\d{2}-\d{2}$"

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["data", "split", "models", "seeds"],
    "properties": {
        "data": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "csv": {"type": "string", "minLength": 1},
                "synthetic": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["generator"],
                    "properties": {
                        "generator": {"enum": list(SYNTHETIC_GENERATORS)},
                        "seed": {"type": "integer", "minimum": 0},
                        "length": {"type": "integer", "minimum": 2},
                        "start": {"type": "string", "pattern": _DATE_PATTERN},
                        "end": {"type": "string", "pattern": _DATE_PATTERN},
                    },
                },
            },
            "oneOf": [{"required": ["csv"]}, {"required": ["synthetic"]}],
        },
        "split": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "boundary": {"type": "string", "pattern": _DATE_PATTERN},
                "train_weeks": {"type": "integer", "minimum": 1},
                "test_weeks": {"type": "integer", "minimum": 1},
            },
            "oneOf": [
                {"required": ["boundary"]},
                {"required": ["train_weeks", "test_weeks"]},
            ],
        },
        "models": {
            "type": "array",
            "minItems": 1,
            "uniqueItems": True,
            "items": {"enum": list(MODEL_NAMES)},
        },
        "seeds": {
            "type": "array",
            "minItems": 1,
            "uniqueItems": True,
            "items": {"type": "integer", "minimum": 0},
        },
        "n_in": {"type": "integer", "minimum": 3},
        "output_dir": {"type": "string", "minLength": 1},
        "standardize": {"type": "boolean"},
        "refit": {"type": "boolean"},
        "training": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "epochs": {"type": "integer", "minimum": 1},
                "batch_size": {"type": "integer", "minimum": 1},
                "lr": {"type": "number", "exclusiveMinimum": 0},
            },
        },
    },
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SplitRule:
    boundary: date | None = None
    train_weeks: int | None = None
    test_weeks: int | None = None

    @property
    def by_date(self) -> bool:
        return self.boundary is not None


@dataclass(frozen=True)
class TrainingOverrides:
    epochs: int | None = None
    batch_size: int | None = None
    lr: float | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    document: dict
    data_csv: str | None
    synthetic: dict | None
    split: SplitRule
    models: tuple
    seeds: tuple
    n_in: int
    output_dir: str
    standardize: bool
    refit: bool
    training: TrainingOverrides

    @property
    def hash(self) -> str:
        return config_hash(self.document)


def config_hash(document: dict) -> str:
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _parse_date(text: str, label: str) -> date:
    try:
        return date.fromisoformat(text)
    except ValueError as exc:
        raise ConfigError(f"{label}: {exc}") from None


def parse_config(document: dict) -> ExperimentConfig:
    """Validate a decoded JSON document and build the typed config."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(document), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        where = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {where}: {first.message}")

    data = document["data"]
    split_doc = document["split"]
    if "boundary" in split_doc:
        split = SplitRule(boundary=_parse_date(split_doc["boundary"], "split.boundary"))
    else:
        split = SplitRule(
            train_weeks=split_doc["train_weeks"], test_weeks=split_doc["test_weeks"]
        )
    synthetic = data.get("synthetic")
    if synthetic is not None:
        for key in ("start", "end"):
            if key in synthetic:
                _parse_date(synthetic[key], f"data.synthetic.{key}")
    training = document.get("training", {})
    return ExperimentConfig(
        document=document,
        data_csv=data.get("csv"),
        synthetic=synthetic,
        split=split,
        models=tuple(document["models"]),
        seeds=tuple(document["seeds"]),
        n_in=int(document.get("n_in", 10)),
        output_dir=str(document.get("output_dir", "reports")),
        standardize=bool(document.get("standardize", False)),
        refit=bool(document.get("refit", False)),
        training=TrainingOverrides(
            epochs=training.get("epochs"),
            batch_size=training.get("batch_size"),
            lr=training.get("lr"),
        ),
    )


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            document = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise ConfigError("config root must be a JSON object")
    return parse_config(document)


def example_config() -> dict:
    """A complete document exercising the default experiment."""
    return {
        "data": {"synthetic": {"generator": "factor", "seed": 14}},
        "split": {"boundary": "2018-12-28"},
        "models": ["univariate", "multichannel", "multihead"],
        "seeds": [0, 1, 2],
        "n_in": 10,
        "output_dir": "reports",
        "standardize": False,
        "refit": False,
    }
