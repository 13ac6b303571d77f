from .base_interpolator import BaseInterpolator
from .convopt import ConvOptConfig, ConvOptInterpolator, convopt_interpolate
from .kriging import KrigingConfig, KrigingInterpolator, kriging_interpolate, gp_predict
from .learned import RnnInterpolator
from .interpolator_factory import InterpolatorFactory

__all__ = [
    'BaseInterpolator',
    'ConvOptConfig',
    'ConvOptInterpolator',
    'convopt_interpolate',
    'KrigingConfig',
    'KrigingInterpolator',
    'kriging_interpolate',
    'gp_predict',
    'RnnInterpolator',
    'InterpolatorFactory'
]
