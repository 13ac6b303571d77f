from .graph import Graph, FlipMatrix, build_graph, apply_flip
from .operators import (
    ShiftOperator,
    SHIFT_KINDS,
    incidence_matrix,
    adjacency_matrix,
    graph_laplacian,
    hodge_laplacian,
    linegraph_laplacian,
    max_eigenvalue,
    poly_filter,
    conjugate_flip,
)
from .hodge import hodge_decompose, estimate_potentials, divergence
from .embedding import spectral_embedding
from .graph_io import read_graph_file, write_graph_file, read_flow_file, write_flow_file

__all__ = [
    'Graph',
    'FlipMatrix',
    'build_graph',
    'apply_flip',
    'ShiftOperator',
    'SHIFT_KINDS',
    'incidence_matrix',
    'adjacency_matrix',
    'graph_laplacian',
    'hodge_laplacian',
    'linegraph_laplacian',
    'max_eigenvalue',
    'poly_filter',
    'conjugate_flip',
    'hodge_decompose',
    'estimate_potentials',
    'divergence',
    'spectral_embedding',
    'read_graph_file',
    'write_graph_file',
    'read_flow_file',
    'write_flow_file',
]
