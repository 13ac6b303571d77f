"""Divergence-minimising flow completion.

Observed entries are fixed; the unobserved block x solves

    min_x ||B_U x + B_O f_O||^2 + ridge ||x||^2

which is a damped sparse least-squares problem handed to LSQR.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Any, Dict

import networkx as nx
import numpy as np
from scipy.sparse.linalg import lsqr

from config.config_loader import dataclass_from_dict
from graphs.graph import Graph
from graphs.operators import incidence_matrix
from utils.errors import DimensionMismatchError, EmptyObservationError

from .base_interpolator import BaseInterpolator, Observed, as_mask

SOLVER_TOL = 1e-14
FALLBACK_RIDGE = 1e-8


@dataclass(frozen=True)
class ConvOptConfig:
    ridge: float = 1e-6

    def __post_init__(self):
        if self.ridge < 0:
            raise ValueError(f"ridge must be >= 0, got {self.ridge}")

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "ConvOptConfig":
        return dataclass_from_dict(cls, values, "baselines.convopt")


def _unobserved_has_cycle(g: Graph, unobserved: np.ndarray) -> bool:
    sub = nx.Graph()
    sub.add_edges_from(g.edges[e] for e in unobserved)
    return not nx.is_forest(sub)


def convopt_interpolate(f_obs: np.ndarray, observed: Observed, g: Graph,
                        cfg: ConvOptConfig = None) -> np.ndarray:
    cfg = cfg or ConvOptConfig()
    f_obs = np.asarray(f_obs, dtype=float)
    if f_obs.shape != (g.num_edges,):
        raise DimensionMismatchError(f"flow of shape {f_obs.shape} for a graph with {g.num_edges} edges")
    mask = as_mask(observed)
    if not mask.observed:
        raise EmptyObservationError("ConvOpt needs at least one observed edge")

    known = np.array(mask.observed, dtype=np.int64)
    unknown = mask.unobserved(g.num_edges)
    f_hat = np.zeros(g.num_edges)
    f_hat[known] = f_obs[known]
    if unknown.size == 0:
        return f_hat

    ridge = cfg.ridge
    if ridge == 0.0 and _unobserved_has_cycle(g, unknown):
        print(f"⚠️  ConvOpt: unobserved edges contain a cycle; raising ridge to {FALLBACK_RIDGE:g}")
        warnings.warn(
            f"singular ConvOpt system, ridge raised to {FALLBACK_RIDGE:g}", RuntimeWarning, stacklevel=2
        )
        ridge = FALLBACK_RIDGE

    b = incidence_matrix(g)
    rhs = -(b[:, known] @ f_hat[known])
    b_u = b[:, unknown].tocsr()
    iter_lim = max(10 * (unknown.size + g.num_nodes), 100)
    f_hat[unknown] = lsqr(b_u, rhs, damp=math.sqrt(ridge), atol=SOLVER_TOL, btol=SOLVER_TOL,
                          iter_lim=iter_lim)[0]
    return f_hat


class ConvOptInterpolator(BaseInterpolator):
    def __init__(self, graph: Graph, config: Dict[str, Any] = None):
        super().__init__("convopt", graph)
        self.cfg = ConvOptConfig.from_dict(config or {})

    def interpolate(self, f_obs: np.ndarray, observed: Observed) -> np.ndarray:
        return convopt_interpolate(f_obs, observed, self.graph, self.cfg)
