"""Parameter persistence: bit-exact binary (npz) and a readable JSON form."""

from __future__ import annotations

import json

import numpy as np

_KEY_SEP = "::"


def save_params(params: dict, path) -> None:
    """Write params to an npz archive; float64 values round-trip bit-exactly."""
    flat = {}
    for lid, p in params.items():
        for name, arr in p.items():
            flat[f"{lid}{_KEY_SEP}{name}"] = np.asarray(arr, dtype=np.float64)
    np.savez(path, **flat)


def load_params(path) -> dict:
    params: dict[str, dict[str, np.ndarray]] = {}
    with np.load(path) as archive:
        for key in archive.files:
            lid, name = key.rsplit(_KEY_SEP, 1)
            params.setdefault(lid, {})[name] = archive[key]
    return params


def params_to_json(params: dict) -> str:
    doc = {
        lid: {
            name: {"shape": list(arr.shape), "values": np.asarray(arr).ravel().tolist()}
            for name, arr in p.items()
        }
        for lid, p in params.items()
    }
    return json.dumps(doc, sort_keys=True)


def params_from_json(text: str) -> dict:
    doc = json.loads(text)
    return {
        lid: {
            name: np.array(entry["values"], dtype=np.float64).reshape(entry["shape"])
            for name, entry in p.items()
        }
        for lid, p in doc.items()
    }
