from .interpolation import InterpolationExperiment, run_interpolation_experiment
from .localization import LocalizationExperiment, run_localization_experiment

__all__ = [
    'InterpolationExperiment',
    'LocalizationExperiment',
    'run_interpolation_experiment',
    'run_localization_experiment'
]
