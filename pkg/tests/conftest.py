import numpy as np
import pytest

from graphs.graph import build_graph
from utils.rng import make_rng


@pytest.fixture
def triangle():
    return build_graph([(0, 1), (1, 2), (0, 2)], 3)


@pytest.fixture
def path3():
    return build_graph([(0, 1), (1, 2)], 3)


@pytest.fixture
def square_with_diagonal():
    # two triangles sharing edge (0, 2): cycle space of dimension 2
    return build_graph([(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)], 4)


def random_connected_graph(num_nodes: int, extra_edges: int, seed: int):
    """Random spanning tree plus extra chords, with random orientations."""
    rng = make_rng(seed)
    order = rng.permutation(num_nodes)
    pairs = set()
    for i in range(1, num_nodes):
        j = int(rng.integers(i))
        pairs.add((min(order[i], order[j]), max(order[i], order[j])))
    candidates = [(a, b) for a in range(num_nodes) for b in range(a + 1, num_nodes) if (a, b) not in pairs]
    chosen = rng.permutation(len(candidates))[:extra_edges]
    pairs.update(candidates[k] for k in chosen)
    edges = [(b, a) if rng.random() < 0.5 else (a, b) for a, b in sorted(pairs)]
    return build_graph(edges, num_nodes)


@pytest.fixture
def random_graph():
    return random_connected_graph


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
