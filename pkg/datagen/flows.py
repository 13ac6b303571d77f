"""Synthetic flow generators.

Every generator is a pure function of its arguments and seed. Record i of a
family draws from its own stream ``make_rng(seed, STREAM_SAMPLES, i)``.
"""

import math
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.sparse

from graphs.graph import Graph
from graphs.hodge import hodge_decompose
from graphs.operators import ShiftOperator, adjacency_matrix, incidence_matrix, max_eigenvalue
from utils.errors import DisconnectedGraphError, NodeIdOutOfRangeError
from utils.rng import STREAM_NOISE, STREAM_SAMPLES, SeedLike, make_rng

from .dataset import Dataset, FlowRecord
from .partition import PartitionedGraph

RELATIVE_DIFFUSION_NOISE = 0.01
RELATIVE_CYCLIC_NOISE = 0.1
RELATIVE_GRADIENT_NOISE = 0.01
SOURCE_FRACTION = 0.1


def _rms(f: np.ndarray) -> float:
    return float(np.sqrt(np.mean(f ** 2))) if f.size else 0.0


def adjacency_lambda(g: Graph) -> float:
    """Largest eigenvalue of A, via power iteration on the PSD shift A + d_max I."""
    adj = adjacency_matrix(g)
    if g.num_edges == 0:
        return 1.0
    d_max = float(g.degrees().max())
    shifted = adj + d_max * scipy.sparse.identity(g.num_nodes, format="csr")
    return max_eigenvalue(shifted) - d_max


def smooth_node_signal(z: np.ndarray, node_shift: ShiftOperator, order: int) -> np.ndarray:
    """Low-pass (I - L0 / lambda_max)^order applied to a node signal."""
    for _ in range(order):
        z = z - node_shift.apply(z)
    return z


def diffusion_flow(pg: PartitionedGraph, v: int, t: int, noise_std: Optional[float] = None,
                   seed: SeedLike = 0, lam: Optional[float] = None) -> Tuple[np.ndarray, int]:
    """f = B^T (A / lambda_1)^t delta_v + noise, labelled with v's community.

    ``noise_std=None`` uses 1% of the largest clean entry. ``lam`` lets callers
    reuse a precomputed lambda_1(A).
    """
    g = pg.graph
    if not 0 <= v < g.num_nodes:
        raise NodeIdOutOfRangeError(f"source node {v} outside [0, {g.num_nodes})")
    if t < 0:
        raise ValueError(f"diffusion time must be >= 0, got {t}")

    adj = adjacency_matrix(g)
    lam = adjacency_lambda(g) if lam is None else lam
    x = np.zeros(g.num_nodes)
    x[v] = 1.0
    for _ in range(t):
        x = (adj @ x) / lam
    clean = incidence_matrix(g).T @ x

    std = RELATIVE_DIFFUSION_NOISE * float(np.max(np.abs(clean), initial=0.0)) if noise_std is None else noise_std
    if std > 0.0:
        clean = clean + make_rng(seed, STREAM_NOISE).normal(0.0, std, g.num_edges)
    return clean, int(pg.community_of[v])


def top_degree_sources(pg: PartitionedGraph) -> list:
    """Per community, the ceil(10%) highest-degree members (ties by node id)."""
    degrees = pg.graph.degrees()
    sources = []
    for c in range(pg.num_communities):
        members = pg.members(c)
        ranked = sorted(members.tolist(), key=lambda node: (-degrees[node], node))
        sources.append(ranked[:max(1, math.ceil(SOURCE_FRACTION * len(ranked)))])
    return sources


def localization_dataset(pg: PartitionedGraph, n_signals: int, t_range: Sequence[int] = (1, 20),
                         noise_std: Optional[float] = None, seed: int = 0) -> Dataset:
    t_min, t_max = int(t_range[0]), int(t_range[1])
    if t_min < 0 or t_max < t_min:
        raise ValueError(f"invalid diffusion time range {t_range}")
    sources = top_degree_sources(pg)
    lam = adjacency_lambda(pg.graph)
    k = pg.num_communities

    records = []
    for i in range(n_signals):
        rng = make_rng(seed, STREAM_SAMPLES, i)
        community = int(rng.integers(k))
        v = int(rng.choice(sources[community]))
        t = int(rng.integers(t_min, t_max + 1))
        f, label = diffusion_flow(pg, v, t, noise_std, rng, lam=lam)
        records.append(FlowRecord(f, label=label, source=v, time=t, seed=seed))

    config = {"n_signals": n_signals, "t_range": [t_min, t_max], "noise_std": noise_std}
    label_map = {str(c): f"community-{c}" for c in range(k)}
    return Dataset(pg.graph, tuple(records), "localization", config, seed, label_map)


def noisy_flow_family(f_base: np.ndarray, g: Graph, n: int, cyclic_std: Optional[float] = None,
                      gradient_std: Optional[float] = None, smooth_order: int = 10,
                      seed: int = 0) -> Dataset:
    """f_base plus cyclic noise (projected onto ker L1) plus smooth gradient noise."""
    if n < 1:
        raise ValueError(f"need at least one sample, got n={n}")
    f_base = np.asarray(f_base, dtype=float)
    rms = _rms(f_base)
    cyclic_std = RELATIVE_CYCLIC_NOISE * rms if cyclic_std is None else cyclic_std
    gradient_std = RELATIVE_GRADIENT_NOISE * rms if gradient_std is None else gradient_std

    b_t = incidence_matrix(g).T.tocsr()
    node_shift = ShiftOperator.build(g, "node")
    records = []
    for i in range(n):
        rng = make_rng(seed, STREAM_SAMPLES, i)
        eta = rng.normal(0.0, cyclic_std, g.num_edges)
        zeta = rng.normal(0.0, gradient_std, g.num_nodes)
        cyclic, _ = hodge_decompose(eta, g)
        gradient = b_t @ smooth_node_signal(zeta, node_shift, smooth_order)
        records.append(FlowRecord(f_base + cyclic + gradient, seed=seed))

    config = {"n": n, "cyclic_std": cyclic_std, "gradient_std": gradient_std, "smooth_order": smooth_order}
    return Dataset(g, tuple(records), "cyclic-family", config, seed)


def gradient_flow_family(g: Graph, n: int, potential_std: float = 1.0, smooth_order: int = 10,
                         seed: int = 0) -> Dataset:
    """Smooth gradient flows B^T Phi with low-pass filtered Gaussian potentials."""
    if not g.is_connected():
        raise DisconnectedGraphError("gradient flow families need a connected graph")
    if n < 1:
        raise ValueError(f"need at least one sample, got n={n}")

    b_t = incidence_matrix(g).T.tocsr()
    node_shift = ShiftOperator.build(g, "node")
    records = []
    for i in range(n):
        eta = make_rng(seed, STREAM_SAMPLES, i).normal(0.0, potential_std, g.num_nodes)
        records.append(FlowRecord(b_t @ smooth_node_signal(eta, node_shift, smooth_order), seed=seed))

    config = {"n": n, "potential_std": potential_std, "smooth_order": smooth_order}
    return Dataset(g, tuple(records), "gradient-family", config, seed)


def random_cyclic_flow(g: Graph, seed: int = 0, scale: float = 1.0) -> np.ndarray:
    """Gaussian edge noise projected onto the cyclic space; zero on trees."""
    eta = make_rng(seed, STREAM_NOISE).normal(0.0, scale, g.num_edges)
    cyclic, _ = hodge_decompose(eta, g)
    return cyclic
