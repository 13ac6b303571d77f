"""Flow datasets and their on-disk layout.

A dataset directory holds

    manifest.json   schema version, generator, config, seed, file names, label map
    graph.txt       the graph in the plain-text graph format
    flows.csv       one row per record, one column per edge
    records.csv     label, source, time, seed and observed-edge bitmask per record
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
import pandas as pd

from graphs.graph import Graph
from graphs.graph_io import read_graph_file, write_graph_file
from utils.errors import DimensionMismatchError, LabelOutOfRangeError

from .masks import MaskSet

SCHEMA_VERSION = 1
MANIFEST_FILE = "manifest.json"
GRAPH_FILE = "graph.txt"
FLOWS_FILE = "flows.csv"
RECORDS_FILE = "records.csv"

PathLike = Union[str, Path]


@dataclass(frozen=True)
class FlowRecord:
    flow: np.ndarray
    label: Optional[int] = None
    mask: Optional[MaskSet] = None
    source: Optional[int] = None
    time: Optional[int] = None
    seed: Optional[int] = None


@dataclass(frozen=True)
class Dataset:
    graph: Graph
    records: Tuple[FlowRecord, ...]
    generator: str = "manual"
    config: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    label_map: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        for index, record in enumerate(self.records):
            if np.shape(record.flow) != (self.graph.num_edges,):
                raise DimensionMismatchError(
                    f"record {index} has a flow of shape {np.shape(record.flow)} "
                    f"for a graph with {self.graph.num_edges} edges"
                )
            if self.label_map and record.label is not None and str(record.label) not in self.label_map:
                raise LabelOutOfRangeError(f"record {index} has label {record.label} outside the label map")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def num_classes(self) -> int:
        return len(self.label_map)

    def flows(self) -> np.ndarray:
        if not self.records:
            return np.zeros((0, self.graph.num_edges))
        return np.stack([r.flow for r in self.records])

    def labels(self) -> np.ndarray:
        return np.array([-1 if r.label is None else r.label for r in self.records], dtype=np.int64)

    def with_masks(self, masks) -> "Dataset":
        records = tuple(
            FlowRecord(r.flow, r.label, m, r.source, r.time, r.seed) for r, m in zip(self.records, masks)
        )
        return Dataset(self.graph, records, self.generator, self.config, self.seed, self.label_map)


def _optional_ints(values) -> pd.array:
    return pd.array(values, dtype="Int64")


def save_dataset(ds: Dataset, directory: PathLike) -> str:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    num_edges = ds.graph.num_edges

    write_graph_file(ds.graph, directory / GRAPH_FILE)

    columns = [f"e{i}" for i in range(num_edges)]
    pd.DataFrame(ds.flows(), columns=columns).to_csv(
        directory / FLOWS_FILE, index=False, float_format="%.17g", lineterminator="\n"
    )

    records = pd.DataFrame({
        "label": _optional_ints([r.label for r in ds.records]),
        "source": _optional_ints([r.source for r in ds.records]),
        "time": _optional_ints([r.time for r in ds.records]),
        "seed": _optional_ints([r.seed for r in ds.records]),
        "observed": [r.mask.to_bitstring(num_edges) if r.mask else "" for r in ds.records],
    })
    records.to_csv(directory / RECORDS_FILE, index=False, lineterminator="\n")

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "generator": ds.generator,
        "config": ds.config,
        "seed": ds.seed,
        "graph_file": GRAPH_FILE,
        "flows_file": FLOWS_FILE,
        "records_file": RECORDS_FILE,
        "record_count": len(ds),
        "num_edges": num_edges,
        "label_map": ds.label_map,
    }
    with open(directory / MANIFEST_FILE, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return str(directory)


def _none_if_missing(value) -> Optional[int]:
    return None if pd.isna(value) else int(value)


def load_dataset(directory: PathLike) -> Dataset:
    directory = Path(directory)
    try:
        with open(directory / MANIFEST_FILE, "r", encoding="utf-8") as f:
            manifest = json.load(f)
    except FileNotFoundError:
        raise FileNotFoundError(f"Dataset manifest not found: {directory / MANIFEST_FILE}")
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(
            f"{directory}: unsupported dataset schema version {manifest.get('schema_version')}"
        )

    graph = read_graph_file(directory / manifest["graph_file"])
    flows = pd.read_csv(directory / manifest["flows_file"], dtype=float,
                        float_precision="round_trip").to_numpy()
    meta = pd.read_csv(
        directory / manifest["records_file"],
        dtype={"label": "Int64", "source": "Int64", "time": "Int64", "seed": "Int64", "observed": str},
        keep_default_na=False,
        na_values={"label": [""], "source": [""], "time": [""], "seed": [""]},
    )
    if flows.shape[0] != manifest["record_count"] or len(meta) != manifest["record_count"]:
        raise DimensionMismatchError(
            f"{directory}: manifest announces {manifest['record_count']} records, "
            f"found {flows.shape[0]} flows and {len(meta)} metadata rows"
        )

    records = []
    for flow, row in zip(flows, meta.itertuples(index=False)):
        mask = MaskSet.from_bitstring(row.observed) if row.observed else None
        records.append(FlowRecord(
            flow=np.array(flow, dtype=float),
            label=_none_if_missing(row.label),
            mask=mask,
            source=_none_if_missing(row.source),
            time=_none_if_missing(row.time),
            seed=_none_if_missing(row.seed),
        ))
    return Dataset(graph, tuple(records), manifest["generator"], manifest["config"],
                   manifest["seed"], manifest["label_map"])
