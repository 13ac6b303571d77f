from typing import Any, Dict

from graphs.graph import Graph
from graphs.operators import ShiftOperator

from .agnn import AggregationGNN, AgnnTrainingConfig
from .base_model import BaseFlowModel
from .hodge_rnn import HodgeRNN, RnnTrainingConfig


class ModelFactory:
    # model name -> (model class, shift kind)
    _models = {
        'hodge-rnn': (HodgeRNN, 'hodge'),
        'linegraph-rnn': (HodgeRNN, 'linegraph'),
        'hodge-agnn': (AggregationGNN, 'hodge'),
        'linegraph-agnn': (AggregationGNN, 'linegraph'),
        'node-agnn': (AggregationGNN, 'node'),
    }

    @classmethod
    def create_model(cls, model_type: str, graph: Graph, config: Dict[str, Any] = None) -> BaseFlowModel:
        if model_type not in cls._models:
            raise ValueError(f"Unsupported model type: {model_type}. Supported types: {list(cls._models.keys())}")

        model_class, shift = cls._models[model_type]
        settings = dict(config or {}, shift=shift)
        if model_class is HodgeRNN:
            return HodgeRNN(ShiftOperator.build(graph, shift), RnnTrainingConfig.from_dict(settings))
        return AggregationGNN(graph, AgnnTrainingConfig.from_dict(settings))

    @classmethod
    def get_supported_models(cls) -> list:
        return list(cls._models.keys())

    @classmethod
    def get_model_info(cls, model_type: str, graph: Graph) -> Dict[str, str]:
        if model_type not in cls._models:
            raise ValueError(f"Unsupported model type: {model_type}")

        model = cls.create_model(model_type, graph)
        return {
            'name': model.name,
            'description': model.description,
        }
