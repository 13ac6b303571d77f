from .metrics_calculator import MetricsCalculator, psnr, accuracy
from .rng import make_rng

__all__ = [
    'MetricsCalculator',
    'psnr',
    'accuracy',
    'make_rng'
]
