import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from utils.errors import DimensionMismatchError
from utils.rng import SeedLike, make_rng

# absorbs representation error in fraction * E before flooring
FLOOR_SLACK = 1e-9


@dataclass(frozen=True)
class MaskSet:
    """Observed edges (Omega) and, during training, the artificially hidden subset Psi."""

    observed: Tuple[int, ...]
    artificial: Tuple[int, ...] = ()

    def __post_init__(self):
        observed = tuple(sorted(int(e) for e in self.observed))
        artificial = tuple(sorted(int(e) for e in self.artificial))
        if len(set(observed)) != len(observed):
            raise ValueError("observed edge set has duplicates")
        if not set(artificial) <= set(observed):
            raise ValueError("artificial mask must be a subset of the observed edges")
        object.__setattr__(self, "observed", observed)
        object.__setattr__(self, "artificial", artificial)

    @classmethod
    def all_observed(cls, num_edges: int) -> "MaskSet":
        return cls(tuple(range(num_edges)))

    def visible(self) -> np.ndarray:
        """Edges fed to the model: Omega minus Psi."""
        hidden = set(self.artificial)
        return np.array([e for e in self.observed if e not in hidden], dtype=np.int64)

    def unobserved(self, num_edges: int) -> np.ndarray:
        seen = set(self.observed)
        return np.array([e for e in range(num_edges) if e not in seen], dtype=np.int64)

    def with_artificial(self, artificial: Iterable[int]) -> "MaskSet":
        return MaskSet(self.observed, tuple(artificial))

    def to_bitstring(self, num_edges: int) -> str:
        bits = np.zeros(num_edges, dtype=np.int8)
        bits[list(self.observed)] = 1
        return "".join(str(b) for b in bits)

    @classmethod
    def from_bitstring(cls, bits: str) -> "MaskSet":
        return cls(tuple(i for i, b in enumerate(bits) if b == "1"))


def restrict(f: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Copy of ``f`` that keeps only ``edges`` and zeroes the rest."""
    f = np.asarray(f, dtype=float)
    out = np.zeros_like(f)
    edges = np.asarray(edges, dtype=np.int64)
    if edges.size and edges.max() >= f.shape[0]:
        raise DimensionMismatchError(f"edge index {edges.max()} outside a flow of length {f.shape[0]}")
    out[edges] = f[edges]
    return out


def mask_flow(f: np.ndarray, unobserved_fraction: float, seed: SeedLike) -> Tuple[np.ndarray, MaskSet]:
    if not 0.0 <= unobserved_fraction < 1.0:
        raise ValueError(f"unobserved fraction must lie in [0, 1), got {unobserved_fraction}")
    f = np.asarray(f, dtype=float)
    num_edges = f.shape[0]
    n_hidden = int(math.floor(unobserved_fraction * num_edges + FLOOR_SLACK))
    rng = make_rng(seed)
    hidden = set(rng.choice(num_edges, size=n_hidden, replace=False).tolist()) if n_hidden else set()
    mask = MaskSet(tuple(e for e in range(num_edges) if e not in hidden))
    return restrict(f, np.array(mask.observed, dtype=np.int64)), mask


def sample_artificial(mask: MaskSet, fraction: float, rng: np.random.Generator) -> MaskSet:
    """Uniform random Psi within Omega holding ``fraction`` of it (at least one edge)."""
    observed = np.array(mask.observed, dtype=np.int64)
    if observed.size == 0:
        return MaskSet(mask.observed, ())
    size = min(observed.size, max(1, int(round(fraction * observed.size))))
    picked = rng.choice(observed, size=size, replace=False)
    return MaskSet(mask.observed, tuple(picked.tolist()))
