from functools import partial
from typing import Any, Dict, Optional

from graphs.graph import Graph

from .base_interpolator import BaseInterpolator
from .convopt import ConvOptInterpolator
from .kriging import KrigingInterpolator
from .learned import RnnInterpolator


class InterpolatorFactory:
    _interpolators = {
        'convopt': ConvOptInterpolator,
        'kriging': KrigingInterpolator,
        'hodge-rnn': partial(RnnInterpolator, shift='hodge'),
        'linegraph-rnn': partial(RnnInterpolator, shift='linegraph'),
    }
    _learned = frozenset({'hodge-rnn', 'linegraph-rnn'})

    @classmethod
    def create_interpolator(cls, method: str, graph: Graph, config: Dict[str, Any] = None,
                            seed: Optional[int] = None) -> BaseInterpolator:
        if method not in cls._interpolators:
            raise ValueError(f"Unsupported method: {method}. Supported methods: {list(cls._interpolators.keys())}")

        interpolator_class = cls._interpolators[method]
        if method in cls._learned:
            return interpolator_class(graph, config, seed=seed)
        return interpolator_class(graph, config)

    @classmethod
    def get_supported_methods(cls) -> list:
        return list(cls._interpolators.keys())

    @classmethod
    def is_learned(cls, method: str) -> bool:
        return method in cls._learned
