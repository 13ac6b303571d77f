import numpy as np

from utils.errors import DimTooLargeError, DisconnectedGraphError

from .graph import Graph
from .operators import graph_laplacian

SIGN_ATOL = 1e-12


def spectral_embedding(g: Graph, dim: int) -> np.ndarray:
    """N x dim node coordinates from the Laplacian eigenvectors of the dim
    smallest nonzero eigenvalues.

    Each column is unit norm and its first entry with magnitude above 1e-12
    is made positive.
    """
    if dim < 1 or dim >= g.num_nodes:
        raise DimTooLargeError(
            f"embedding dimension {dim} must lie in [1, {g.num_nodes - 1}] for {g.num_nodes} nodes"
        )
    if not g.is_connected():
        raise DisconnectedGraphError("spectral drawing needs a connected graph")

    laplacian = graph_laplacian(g).toarray()
    _, vectors = np.linalg.eigh(laplacian)
    # connected: exactly one zero eigenvalue, in column 0
    coords = vectors[:, 1:dim + 1].copy()
    for j in range(dim):
        column = coords[:, j]
        column /= np.linalg.norm(column)
        nonzero = np.flatnonzero(np.abs(column) > SIGN_ATOL)
        if nonzero.size and column[nonzero[0]] < 0:
            column *= -1.0
    return coords
