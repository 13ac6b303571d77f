"""Matrices derived from a Graph, spectral normalisation and polynomial filters."""

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse
from scipy.sparse import csc_matrix, csr_matrix

from utils.rng import make_rng
from utils.errors import DimensionMismatchError, NonConvergenceError, UnsupportedShiftError

from .graph import FlipMatrix, Graph

SHIFT_KINDS = ("hodge", "linegraph", "node")

# applied to the power-iteration estimate so that ||S / lambda_max|| <= 1
LAMBDA_INFLATION = 1e-6


def incidence_matrix(g: Graph) -> csc_matrix:
    """N x E matrix with -1 at each edge's tail and +1 at its head."""
    num_edges = g.num_edges
    if num_edges == 0:
        return csc_matrix((g.num_nodes, 0), dtype=float)
    data = np.concatenate([-np.ones(num_edges), np.ones(num_edges)])
    rows = np.concatenate([g.tails, g.heads])
    cols = np.concatenate([np.arange(num_edges), np.arange(num_edges)])
    return csc_matrix((data, (rows, cols)), shape=(g.num_nodes, num_edges), dtype=float)


def adjacency_matrix(g: Graph) -> csr_matrix:
    n = g.num_nodes
    if g.num_edges == 0:
        return csr_matrix((n, n), dtype=float)
    rows = np.concatenate([g.tails, g.heads])
    cols = np.concatenate([g.heads, g.tails])
    return csr_matrix((np.ones(rows.shape[0]), (rows, cols)), shape=(n, n), dtype=float)


def graph_laplacian(g: Graph) -> csr_matrix:
    adj = adjacency_matrix(g)
    degrees = np.asarray(adj.sum(axis=1)).ravel()
    return (scipy.sparse.diags(degrees, 0, format="csr") - adj).tocsr()


def hodge_laplacian(g: Graph) -> csr_matrix:
    b = incidence_matrix(g)
    return (b.T @ b).tocsr()


def linegraph_laplacian(g: Graph) -> csr_matrix:
    """Laplacian of the unweighted linegraph (edges adjacent when they share a node)."""
    num_edges = g.num_edges
    if num_edges == 0:
        return csr_matrix((0, 0), dtype=float)
    unsigned = abs(incidence_matrix(g))
    # simple graphs: two distinct edges share at most one endpoint
    shared = (unsigned.T @ unsigned).tocsr()
    adj = (shared - scipy.sparse.diags(shared.diagonal(), 0)).tocsr()
    adj.eliminate_zeros()
    degrees = np.asarray(adj.sum(axis=1)).ravel()
    return (scipy.sparse.diags(degrees, 0, format="csr") - adj).tocsr()


def max_eigenvalue(
    m, tol: float = 1e-8, max_iter: int = 10000, seed: int = 0
) -> float:
    """Largest eigenvalue of a symmetric PSD matrix by power iteration.

    Stops when the Rayleigh quotient changes by less than ``tol`` relative to
    itself. The zero matrix returns 0.
    """
    m = scipy.sparse.csr_matrix(m)
    n = m.shape[0]
    if n == 0 or m.count_nonzero() == 0:
        return 0.0

    rng = make_rng(seed)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)

    lam = 0.0
    for _ in range(max_iter):
        y = m @ x
        y_norm = np.linalg.norm(y)
        if y_norm == 0.0:
            x = rng.standard_normal(n)
            x /= np.linalg.norm(x)
            continue
        lam_new = float(x @ y)
        x = y / y_norm
        if abs(lam_new - lam) <= tol * abs(lam_new):
            return lam_new
        lam = lam_new
    raise NonConvergenceError(
        f"power iteration did not reach relative tolerance {tol} in {max_iter} iterations"
    )


@dataclass(frozen=True)
class ShiftOperator:
    kind: str
    matrix: csr_matrix
    lambda_max: float

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def build(cls, g: Graph, kind: str, tol: float = 1e-8) -> "ShiftOperator":
        builders = {
            "hodge": hodge_laplacian,
            "linegraph": linegraph_laplacian,
            "node": graph_laplacian,
        }
        if kind not in builders:
            raise UnsupportedShiftError(
                f"Unsupported shift kind: {kind}. Supported kinds: {list(builders.keys())}"
            )
        matrix = builders[kind](g)
        return cls.from_matrix(kind, matrix, tol=tol)

    @classmethod
    def from_matrix(cls, kind: str, matrix, tol: float = 1e-8) -> "ShiftOperator":
        matrix = csr_matrix(matrix, dtype=float)
        lam = max_eigenvalue(matrix, tol=tol)
        lambda_max = lam * (1.0 + LAMBDA_INFLATION) if lam > 0 else 1.0
        return cls(kind, matrix, lambda_max)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """(S / lambda_max) x"""
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.dimension:
            raise DimensionMismatchError(
                f"signal has {x.shape[0]} entries but the {self.kind} shift has dimension {self.dimension}"
            )
        return (self.matrix @ x) / self.lambda_max

    def reoriented(self, flip: FlipMatrix) -> "ShiftOperator":
        """Operator for the same graph after reorienting edges by ``flip``."""
        if self.kind != "hodge":
            return self
        return ShiftOperator(self.kind, conjugate_flip(flip, self.matrix), self.lambda_max)


def poly_filter(
    coeffs: Sequence[float], s: ShiftOperator, x: np.ndarray, normalized: bool = False
) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != s.dimension:
        raise DimensionMismatchError(
            f"signal has {x.shape[0]} entries but the shift has dimension {s.dimension}"
        )
    out = np.zeros_like(x)
    power = x
    for k, g_k in enumerate(coeffs):
        if k > 0:
            power = s.apply(power) if normalized else s.matrix @ power
        out = out + g_k * power
    return out


def conjugate_flip(flip: FlipMatrix, m) -> csr_matrix:
    m = csr_matrix(m, dtype=float)
    if m.shape[0] != len(flip) or m.shape[1] != len(flip):
        raise DimensionMismatchError(
            f"matrix of shape {m.shape} cannot be conjugated by a flip of length {len(flip)}"
        )
    f = scipy.sparse.diags(flip.signs, 0, format="csr")
    return (f @ m @ f).tocsr()


def is_symmetric(m, atol: float = 1e-12) -> bool:
    m = csr_matrix(m)
    diff = m - m.T
    return diff.nnz == 0 or float(abs(diff).max()) <= atol


def spectral_radius_bound(s: ShiftOperator, probes: int = 8, seed: int = 0) -> float:
    """Largest ||(S/lambda_max) v|| over random unit probes (should stay <= 1)."""
    rng = make_rng(seed)
    worst = 0.0
    for _ in range(probes):
        v = rng.standard_normal(s.dimension)
        v /= np.linalg.norm(v)
        worst = max(worst, float(np.linalg.norm(s.apply(v))))
    return worst
