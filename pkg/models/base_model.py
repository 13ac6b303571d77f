from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from autodiff.checkpoint import load_params, save_params


class BaseFlowModel(ABC):
    """Common surface of the trainable flow models: named parameter arrays
    that can be checkpointed and restored."""

    def __init__(self, name: str, description: str):
        self.name = name
        self.description = description

    @abstractmethod
    def parameter_arrays(self) -> Dict[str, np.ndarray]:
        pass

    @abstractmethod
    def load_arrays(self, arrays: Dict[str, np.ndarray], meta: Dict[str, Any]) -> None:
        pass

    def checkpoint_meta(self) -> Dict[str, Any]:
        return {}

    def save(self, path: Union[str, Path]) -> str:
        return save_params(path, self.name, self.parameter_arrays(), self.checkpoint_meta())

    def load(self, path: Union[str, Path]) -> None:
        model, arrays, meta = load_params(path)
        if model != self.name:
            raise ValueError(f"checkpoint holds '{model}' parameters, expected '{self.name}'")
        self.load_arrays(arrays, meta)
