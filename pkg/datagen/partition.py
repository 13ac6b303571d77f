from dataclasses import dataclass

import networkx as nx
import numpy as np

from graphs.graph import Graph, build_graph
from utils.errors import DisconnectedAfterRetriesError
from utils.rng import make_rng


@dataclass(frozen=True)
class PartitionedGraph:
    """A graph together with the community label of every node."""

    graph: Graph
    community_of: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.community_of, dtype=np.int64)
        if labels.shape != (self.graph.num_nodes,):
            raise ValueError(
                f"{labels.shape[0]} community labels for {self.graph.num_nodes} nodes"
            )
        labels.setflags(write=False)
        object.__setattr__(self, "community_of", labels)

    @property
    def num_communities(self) -> int:
        return int(self.community_of.max()) + 1 if self.community_of.size else 0

    def members(self, community: int) -> np.ndarray:
        return np.flatnonzero(self.community_of == community)


def planted_partition(k: int, nodes_per: int, p: float, q: float, seed: int = 0,
                      max_retries: int = 100) -> PartitionedGraph:
    """Planted-partition graph, resampled until connected.

    Node i belongs to community i // nodes_per. Every node pair is drawn
    independently with probability p (same community) or q (different), in
    lexicographic pair order from one uniform draw per attempt.
    """
    if not 0.0 <= q <= p <= 1.0:
        raise ValueError(f"need 0 <= q <= p <= 1, got p={p}, q={q}")
    if k < 1 or nodes_per < 1:
        raise ValueError(f"need k >= 1 and nodes_per >= 1, got k={k}, nodes_per={nodes_per}")

    n = k * nodes_per
    community_of = np.repeat(np.arange(k), nodes_per)
    if q == 0.0 and k > 1:
        raise DisconnectedAfterRetriesError(
            f"q=0 with k={k} communities can never produce a connected graph"
        )

    rows, cols = np.triu_indices(n, k=1)
    same = community_of[rows] == community_of[cols]
    prob = np.where(same, p, q)

    for attempt in range(max_retries):
        rng = make_rng(seed, attempt)
        keep = rng.random(rows.shape[0]) < prob
        edges = list(zip(rows[keep].tolist(), cols[keep].tolist()))
        nxg = nx.Graph()
        nxg.add_nodes_from(range(n))
        nxg.add_edges_from(edges)
        if nx.is_connected(nxg):
            return PartitionedGraph(build_graph(edges, n), community_of)

    raise DisconnectedAfterRetriesError(
        f"no connected planted-partition graph (k={k}, nodes_per={nodes_per}, p={p}, q={q}) "
        f"after {max_retries} attempts"
    )
