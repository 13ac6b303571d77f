"""Kriging of flow magnitudes in a spectral drawing of the graph.

Nodes are placed with the spectral embedding, every edge sits at the
midpoint of its endpoints and a Gaussian process with a squared-exponential
kernel interpolates |f| between edge locations. The sign of the flow is not
recoverable this way.
"""

from dataclasses import dataclass, replace
from typing import Any, Dict, Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.spatial.distance import cdist, pdist

from config.config_loader import dataclass_from_dict
from graphs.embedding import spectral_embedding
from graphs.graph import Graph
from utils.errors import DimensionMismatchError, EmptyObservationError, SingularKernelError

from .base_interpolator import BaseInterpolator, Observed, as_mask

# test locations closer than this to a training location count as coincident
COINCIDENT_ATOL = 1e-12


@dataclass(frozen=True)
class KrigingConfig:
    embed_dim: int = 2
    kernel_lengthscale: Optional[float] = None
    kernel_variance: Optional[float] = None
    noise_floor: float = 1e-6

    def __post_init__(self):
        if self.embed_dim < 1:
            raise ValueError(f"embed_dim must be >= 1, got {self.embed_dim}")
        for name in ("kernel_lengthscale", "kernel_variance", "noise_floor"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive, got {value}")

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "KrigingConfig":
        return dataclass_from_dict(cls, values, "baselines.kriging")

    def resolved(self, locations: np.ndarray, values: np.ndarray) -> "KrigingConfig":
        """Fill unset hyperparameters from the data: median distance and sample variance."""
        lengthscale = self.kernel_lengthscale
        if lengthscale is None:
            distances = pdist(locations) if locations.shape[0] > 1 else np.zeros(0)
            median = float(np.median(distances)) if distances.size else 0.0
            lengthscale = median if median > 0 else 1.0
        variance = self.kernel_variance
        if variance is None:
            sample = float(np.var(values, ddof=1)) if values.size > 1 else 0.0
            variance = sample if sample > 0 else 1.0
        return replace(self, kernel_lengthscale=lengthscale, kernel_variance=variance)


def _squared_exponential(sq: np.ndarray, cfg: KrigingConfig) -> np.ndarray:
    return cfg.kernel_variance * np.exp(-sq / (2.0 * cfg.kernel_lengthscale ** 2))


def _kernel(a: np.ndarray, b: np.ndarray, cfg: KrigingConfig) -> np.ndarray:
    sq = cdist(a, b, "sqeuclidean")
    return _squared_exponential(sq, cfg) + cfg.noise_floor * (sq <= COINCIDENT_ATOL)


def _training_kernel(locs: np.ndarray, cfg: KrigingConfig) -> np.ndarray:
    # noise on the diagonal only; repeated locations must not give identical rows
    k = _squared_exponential(cdist(locs, locs, "sqeuclidean"), cfg)
    k[np.diag_indices_from(k)] += cfg.noise_floor
    return k


def gp_predict(train_locs: np.ndarray, train_vals: np.ndarray, test_locs: np.ndarray,
               cfg: KrigingConfig) -> np.ndarray:
    """Posterior mean with a constant prior mean equal to the sample mean."""
    train_locs = np.atleast_2d(np.asarray(train_locs, dtype=float))
    test_locs = np.atleast_2d(np.asarray(test_locs, dtype=float))
    train_vals = np.asarray(train_vals, dtype=float)
    if train_vals.shape[0] == 0:
        raise EmptyObservationError("Gaussian-process regression needs at least one training point")
    if train_locs.shape[0] != train_vals.shape[0]:
        raise DimensionMismatchError(f"{train_locs.shape[0]} locations for {train_vals.shape[0]} values")
    cfg = cfg.resolved(train_locs, train_vals)

    mean = float(np.mean(train_vals))
    try:
        factor = cho_factor(_training_kernel(train_locs, cfg), lower=True)
    except LinAlgError as e:
        raise SingularKernelError(f"training kernel is not positive definite: {e}") from e
    weights = cho_solve(factor, train_vals - mean)
    return mean + _kernel(test_locs, train_locs, cfg) @ weights


def edge_midpoints(g: Graph, embed_dim: int) -> np.ndarray:
    coords = spectral_embedding(g, embed_dim)
    return 0.5 * (coords[g.tails] + coords[g.heads])


def kriging_interpolate(f_obs: np.ndarray, observed: Observed, g: Graph,
                        cfg: KrigingConfig = None) -> np.ndarray:
    """|f_obs| on observed edges, kriged magnitudes elsewhere."""
    cfg = cfg or KrigingConfig()
    f_obs = np.asarray(f_obs, dtype=float)
    if f_obs.shape != (g.num_edges,):
        raise DimensionMismatchError(f"flow of shape {f_obs.shape} for a graph with {g.num_edges} edges")
    mask = as_mask(observed)
    if not mask.observed:
        raise EmptyObservationError("kriging needs at least one observed edge")

    known = np.array(mask.observed, dtype=np.int64)
    unknown = mask.unobserved(g.num_edges)
    f_hat = np.zeros(g.num_edges)
    f_hat[known] = np.abs(f_obs[known])
    if unknown.size == 0:
        return f_hat

    locations = edge_midpoints(g, cfg.embed_dim)
    f_hat[unknown] = gp_predict(locations[known], f_hat[known], locations[unknown], cfg)
    return f_hat


class KrigingInterpolator(BaseInterpolator):
    unsigned = True

    def __init__(self, graph: Graph, config: Dict[str, Any] = None):
        super().__init__("kriging", graph)
        self.cfg = KrigingConfig.from_dict(config or {})

    def interpolate(self, f_obs: np.ndarray, observed: Observed) -> np.ndarray:
        return kriging_interpolate(f_obs, observed, self.graph, self.cfg)
