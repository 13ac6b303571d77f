from typing import Callable, Dict

import numpy as np

from .tensor import Tensor

LossFn = Callable[[Dict[str, Tensor]], Tensor]


def analytic_gradients(fn: LossFn, point: Dict[str, np.ndarray]) -> Dict[str, np.ndarray]:
    leaves = {name: Tensor(value) for name, value in point.items()}
    loss = fn(leaves)
    loss.backward()
    return {name: leaf.grad.copy() for name, leaf in leaves.items()}


def _evaluate(fn: LossFn, point: Dict[str, np.ndarray]) -> float:
    return float(fn({name: Tensor(value) for name, value in point.items()}).value)


def grad_check(fn: LossFn, point: Dict[str, np.ndarray], h: float = 1e-5) -> float:
    """Max over coordinates of |analytic - numeric| / max(1, |numeric|).

    Numeric gradients are central differences with step ``h``. The caller
    keeps ``point`` away from kinks (see ``tensor.kink_distance``).
    """
    point = {name: np.array(value, dtype=float) for name, value in point.items()}
    analytic = analytic_gradients(fn, point)

    worst = 0.0
    for name, value in point.items():
        for idx in np.ndindex(value.shape):
            original = value[idx]
            value[idx] = original + h
            f_plus = _evaluate(fn, point)
            value[idx] = original - h
            f_minus = _evaluate(fn, point)
            value[idx] = original
            numeric = (f_plus - f_minus) / (2.0 * h)
            error = abs(analytic[name][idx] - numeric) / max(1.0, abs(numeric))
            worst = max(worst, error)
    return worst
