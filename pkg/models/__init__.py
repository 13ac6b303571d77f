from .base_model import BaseFlowModel
from .hodge_rnn import (
    RnnParams,
    RnnTrainingConfig,
    RnnTrainer,
    HodgeRNN,
    init_rnn_params,
    rnn_forward,
    rnn_loss,
    train_interpolator,
    interpolate,
)
from .agnn import (
    SelectionMatrix,
    CnnParams,
    AgnnTrainingConfig,
    AgnnTrainer,
    AggregationGNN,
    select_top_degree_edges,
    select_top_degree_nodes,
    aggregate_sample,
    init_cnn_params,
    agnn_forward,
    rotate_params,
    train_classifier,
    evaluate_accuracy,
    estimate_potentials,
)
from .model_factory import ModelFactory

__all__ = [
    'BaseFlowModel',
    'RnnParams',
    'RnnTrainingConfig',
    'RnnTrainer',
    'HodgeRNN',
    'init_rnn_params',
    'rnn_forward',
    'rnn_loss',
    'train_interpolator',
    'interpolate',
    'SelectionMatrix',
    'CnnParams',
    'AgnnTrainingConfig',
    'AgnnTrainer',
    'AggregationGNN',
    'select_top_degree_edges',
    'select_top_degree_nodes',
    'aggregate_sample',
    'init_cnn_params',
    'agnn_forward',
    'rotate_params',
    'train_classifier',
    'evaluate_accuracy',
    'estimate_potentials',
    'ModelFactory',
]
