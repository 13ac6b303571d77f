"""Parameter checkpoints.

JSON record::

    {"format": "hodgeflow-params", "version": 1, "model": "<name>",
     "arrays": {"<param>": {"shape": [...], "data": [...]}}, "meta": {...}}

``data`` is the row-major flattening. Python floats serialise with repr,
so values round-trip exactly.
"""

import json
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import numpy as np

CHECKPOINT_FORMAT = "hodgeflow-params"
CHECKPOINT_VERSION = 1


def save_params(path: Union[str, Path], model: str, arrays: Dict[str, np.ndarray],
                meta: Dict[str, Any] = None) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    record = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "model": model,
        "arrays": {
            name: {"shape": list(np.shape(value)), "data": np.asarray(value, dtype=float).ravel().tolist()}
            for name, value in sorted(arrays.items())
        },
        "meta": meta or {},
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(record, f, indent=2, sort_keys=True)
    return str(path)


def load_params(path: Union[str, Path]) -> Tuple[str, Dict[str, np.ndarray], Dict[str, Any]]:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        record = json.load(f)
    if record.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"{path} is not a {CHECKPOINT_FORMAT} checkpoint")
    if record.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {record.get('version')}")
    arrays = {
        name: np.array(entry["data"], dtype=float).reshape(entry["shape"])
        for name, entry in record["arrays"].items()
    }
    return record["model"], arrays, record.get("meta", {})
