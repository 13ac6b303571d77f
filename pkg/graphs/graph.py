from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from utils.errors import (
    DimensionMismatchError,
    DuplicateEdgeError,
    NodeIdOutOfRangeError,
    SelfLoopError,
)

Edge = Tuple[int, int]


@dataclass(frozen=True)
class FlipMatrix:
    """Diagonal of an edge-reorientation matrix F (entries +1 or -1)."""

    signs: np.ndarray

    def __post_init__(self):
        signs = np.asarray(self.signs, dtype=float)
        if signs.ndim != 1 or not np.all(np.abs(signs) == 1.0):
            raise ValueError("flip signs must be a vector of +1/-1 entries")
        signs.setflags(write=False)
        object.__setattr__(self, "signs", signs)

    @classmethod
    def identity(cls, num_edges: int) -> "FlipMatrix":
        return cls(np.ones(num_edges))

    @classmethod
    def random(cls, num_edges: int, rng: np.random.Generator) -> "FlipMatrix":
        return cls(rng.choice([-1.0, 1.0], size=num_edges))

    def __len__(self) -> int:
        return self.signs.shape[0]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with a fixed edge indexing and reference orientation.

    Edge e points from ``edges[e][0]`` (tail) to ``edges[e][1]`` (head).
    """

    num_nodes: int
    edges: Tuple[Edge, ...]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def tails(self) -> np.ndarray:
        return np.array([e[0] for e in self.edges], dtype=np.int64)

    @property
    def heads(self) -> np.ndarray:
        return np.array([e[1] for e in self.edges], dtype=np.int64)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.num_nodes, dtype=np.int64)
        if self.edges:
            np.add.at(deg, self.tails, 1)
            np.add.at(deg, self.heads, 1)
        return deg

    def is_connected(self) -> bool:
        if self.num_nodes <= 1:
            return True
        ones = np.ones(self.num_edges)
        adj = csr_matrix((ones, (self.tails, self.heads)), shape=(self.num_nodes, self.num_nodes))
        n_components, _ = connected_components(adj, directed=False)
        return n_components == 1

    def flipped(self, flip: FlipMatrix) -> "Graph":
        if len(flip) != self.num_edges:
            raise DimensionMismatchError(
                f"flip has {len(flip)} entries but graph has {self.num_edges} edges"
            )
        edges = tuple(
            (h, t) if s < 0 else (t, h) for (t, h), s in zip(self.edges, flip.signs)
        )
        return Graph(self.num_nodes, edges)

    def to_networkx(self) -> nx.Graph:
        nxg = nx.Graph()
        nxg.add_nodes_from(range(self.num_nodes))
        for index, (tail, head) in enumerate(self.edges):
            nxg.add_edge(tail, head, index=index)
        return nxg


def build_graph(edge_list: Iterable[Sequence[int]], num_nodes: int) -> Graph:
    edges: List[Edge] = []
    seen = set()
    for pair in edge_list:
        tail, head = int(pair[0]), int(pair[1])
        if not (0 <= tail < num_nodes and 0 <= head < num_nodes):
            raise NodeIdOutOfRangeError(
                f"edge ({tail}, {head}) references a node outside [0, {num_nodes})"
            )
        if tail == head:
            raise SelfLoopError(f"self-loop at node {tail}")
        key = (min(tail, head), max(tail, head))
        if key in seen:
            raise DuplicateEdgeError(f"duplicate edge {{{tail}, {head}}}")
        seen.add(key)
        edges.append((tail, head))
    return Graph(int(num_nodes), tuple(edges))


def apply_flip(flip: FlipMatrix, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape[0] != len(flip):
        raise DimensionMismatchError(
            f"flow has {f.shape[0]} entries but flip has {len(flip)}"
        )
    return flip.signs * f
