"""Hodge decomposition of edge flows and node-potential estimation."""

from typing import Tuple

import numpy as np
from scipy.sparse.linalg import lsqr

from utils.errors import DimensionMismatchError, DisconnectedGraphError

from .graph import Graph
from .operators import incidence_matrix

SOLVER_TOL = 1e-14
REFINEMENT_PASSES = 2


def _check_flow(f: np.ndarray, g: Graph) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.shape[0] != g.num_edges:
        raise DimensionMismatchError(
            f"flow has shape {f.shape} but graph has {g.num_edges} edges"
        )
    return f


def _potential_fit(f: np.ndarray, g: Graph) -> np.ndarray:
    """Least-squares potentials Phi minimising ||B^T Phi - f||_2.

    LSQR is conjugate gradients on the normal equations L0 Phi = B f; started
    from zero it returns the minimum-norm solution. A couple of refinement
    passes on the residual push B (f - B^T Phi) down to roundoff.
    """
    b_t = incidence_matrix(g).T.tocsr()
    iter_lim = max(10 * g.num_edges, 50)
    phi = np.zeros(g.num_nodes)
    residual = f.copy()
    for _ in range(1 + REFINEMENT_PASSES):
        if not np.any(residual):
            break
        step = lsqr(b_t, residual, atol=SOLVER_TOL, btol=SOLVER_TOL, iter_lim=iter_lim)[0]
        phi = phi + step
        residual = f - b_t @ phi
    return phi


def hodge_decompose(f: np.ndarray, g: Graph) -> Tuple[np.ndarray, np.ndarray]:
    """Split ``f`` into (cyclic, gradient) parts with cyclic + gradient == f."""
    f = _check_flow(f, g)
    if g.num_edges == 0:
        return f.copy(), np.zeros_like(f)
    phi = _potential_fit(f, g)
    gradient = incidence_matrix(g).T @ phi
    cyclic = f - gradient
    return cyclic, gradient


def estimate_potentials(f: np.ndarray, g: Graph) -> np.ndarray:
    """Mean-zero node potentials Phi = (B^T)^+ f."""
    f = _check_flow(f, g)
    if not g.is_connected():
        raise DisconnectedGraphError("node potentials need a connected graph")
    if g.num_edges == 0:
        return np.zeros(g.num_nodes)
    phi = _potential_fit(f, g)
    return phi - phi.mean()


def divergence(f: np.ndarray, g: Graph) -> np.ndarray:
    """Net flow imbalance B f at every node."""
    f = _check_flow(f, g)
    return incidence_matrix(g) @ f
