from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from utils.errors import ShapeMismatchError


@dataclass
class AdamOptimizer:
    """Adam with bias correction. Moments are keyed by parameter name."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0
    first_moment: Dict[str, np.ndarray] = field(default_factory=dict)
    second_moment: Dict[str, np.ndarray] = field(default_factory=dict)

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
        """Return updated copies of ``params``; the optimizer state advances one step."""
        for name, value in params.items():
            if name not in grads or np.shape(grads[name]) != np.shape(value):
                raise ShapeMismatchError(
                    f"gradient for '{name}' has shape {np.shape(grads.get(name))}, "
                    f"parameter has {np.shape(value)}"
                )

        self.step_count += 1
        t = self.step_count
        updated = {}
        for name, value in params.items():
            g = np.asarray(grads[name], dtype=float)
            m = self.first_moment.get(name, np.zeros_like(g))
            v = self.second_moment.get(name, np.zeros_like(g))
            m = self.beta1 * m + (1.0 - self.beta1) * g
            v = self.beta2 * v + (1.0 - self.beta2) * g * g
            self.first_moment[name] = m
            self.second_moment[name] = v
            m_hat = m / (1.0 - self.beta1 ** t)
            v_hat = v / (1.0 - self.beta2 ** t)
            updated[name] = np.asarray(value, dtype=float) - self.lr * m_hat / (np.sqrt(v_hat) + self.epsilon)
        return updated
