from .masks import MaskSet, restrict, mask_flow, sample_artificial
from .partition import PartitionedGraph, planted_partition
from .dataset import Dataset, FlowRecord, save_dataset, load_dataset
from .flows import (
    diffusion_flow,
    localization_dataset,
    noisy_flow_family,
    gradient_flow_family,
    random_cyclic_flow,
    smooth_node_signal,
)

__all__ = [
    'MaskSet',
    'restrict',
    'mask_flow',
    'sample_artificial',
    'PartitionedGraph',
    'planted_partition',
    'Dataset',
    'FlowRecord',
    'save_dataset',
    'load_dataset',
    'diffusion_flow',
    'localization_dataset',
    'noisy_flow_family',
    'gradient_flow_family',
    'random_cyclic_flow',
    'smooth_node_signal',
]
