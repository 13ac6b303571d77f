from .tensor import (
    Tensor,
    constant,
    topological_order,
    kink_distance,
    add,
    scale,
    mul,
    matmul,
    outer,
    soft_threshold,
    relu,
    conv1d,
    max_pool1d,
    flatten,
    affine,
    softmax,
    softmax_cross_entropy,
    masked_mse,
    sum_squares,
)
from .optim import AdamOptimizer
from .gradcheck import grad_check, analytic_gradients
from .checkpoint import save_params, load_params

__all__ = [
    'Tensor',
    'constant',
    'topological_order',
    'kink_distance',
    'add',
    'scale',
    'mul',
    'matmul',
    'outer',
    'soft_threshold',
    'relu',
    'conv1d',
    'max_pool1d',
    'flatten',
    'affine',
    'softmax',
    'softmax_cross_entropy',
    'masked_mse',
    'sum_squares',
    'AdamOptimizer',
    'grad_check',
    'analytic_gradients',
    'save_params',
    'load_params',
]
