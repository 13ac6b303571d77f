import time
from abc import ABC, abstractmethod
from typing import Any, Dict, Sequence, Union

import numpy as np

from datagen.masks import MaskSet
from graphs.graph import Graph
from utils.errors import HodgeFlowError

Observed = Union[MaskSet, Sequence[int]]


def as_mask(observed: Observed) -> MaskSet:
    return observed if isinstance(observed, MaskSet) else MaskSet(tuple(observed))


class BaseInterpolator(ABC):
    """Fills in a flow on the unobserved edges of one graph."""

    unsigned = False

    def __init__(self, name: str, graph: Graph):
        self.name = name
        self.graph = graph

    def fit(self, train_flows: Sequence[np.ndarray], observed: Observed) -> "BaseInterpolator":
        """Learned methods train here; the default is a no-op."""
        return self

    @abstractmethod
    def interpolate(self, f_obs: np.ndarray, observed: Observed) -> np.ndarray:
        pass

    def timed_interpolate(self, f_obs: np.ndarray, observed: Observed) -> Dict[str, Any]:
        start_time = time.time()

        try:
            prediction = self.interpolate(f_obs, observed)
            end_time = time.time()

            return {
                'success': True,
                'prediction': prediction,
                'wall_time_s': end_time - start_time,
                'error': None,
                'method': self.name
            }
        except HodgeFlowError as e:
            end_time = time.time()

            return {
                'success': False,
                'prediction': None,
                'wall_time_s': end_time - start_time,
                'error': str(e),
                'method': self.name
            }
