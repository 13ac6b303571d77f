"""Plain-text graph and flow files.

Graph file: first line ``N E``, then E lines ``tail head`` (0-based).
Flow file: one decimal value per line, aligned with the graph's edge order.
"""

from pathlib import Path
from typing import Union

import numpy as np

from utils.errors import DimensionMismatchError

from .graph import Graph, build_graph

PathLike = Union[str, Path]


def read_graph_file(path: PathLike) -> Graph:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = [line.split() for line in f if line.strip()]
    except FileNotFoundError:
        raise FileNotFoundError(f"Graph file not found: {path}")

    if not lines or len(lines[0]) != 2:
        raise ValueError(f"{path}: first line must be 'N E'")
    num_nodes, num_edges = int(lines[0][0]), int(lines[0][1])
    edge_lines = lines[1:]
    if len(edge_lines) != num_edges:
        raise DimensionMismatchError(
            f"{path}: header announces {num_edges} edges but {len(edge_lines)} follow"
        )
    return build_graph(((int(a), int(b)) for a, b in edge_lines), num_nodes)


def write_graph_file(g: Graph, path: PathLike) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{g.num_nodes} {g.num_edges}\n")
        for tail, head in g.edges:
            f.write(f"{tail} {head}\n")
    return str(path)


def read_flow_file(path: PathLike, g: Graph = None) -> np.ndarray:
    path = Path(path)
    with open(path, "r", encoding="utf-8") as f:
        values = np.array([float(line) for line in f if line.strip()], dtype=float)
    if g is not None and values.shape[0] != g.num_edges:
        raise DimensionMismatchError(
            f"{path}: {values.shape[0]} flow values for a graph with {g.num_edges} edges"
        )
    return values


def write_flow_file(f: np.ndarray, path: PathLike) -> str:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        for value in np.asarray(f, dtype=float):
            out.write(f"{float(value)!r}\n")
    return str(path)
