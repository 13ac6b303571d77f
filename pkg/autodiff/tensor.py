"""Reverse-mode automatic differentiation over dense numpy arrays.

A ``Tensor`` records the operation that produced it and a closure that
pushes its gradient to its parents. ``Tensor.backward`` orders the graph
topologically, zeroes every gradient reachable from the root and runs the
closures in reverse order, so each node is visited exactly once.

Only the operations the flow models need are provided; there is no
broadcasting beyond adding a bias column inside ``conv1d``.
"""

import math
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from utils.errors import CycleDetectedError, LabelOutOfRangeError, ShapeMismatchError

ArrayLike = Union[np.ndarray, float, Sequence[float]]


class Tensor:
    def __init__(self, value: ArrayLike, parents: Sequence["Tensor"] = (), op: str = "",
                 requires_grad: bool = True):
        self.value = np.array(value, dtype=float)
        self.grad = np.zeros_like(self.value)
        self.parents = tuple(parents)
        self.op = op
        self.requires_grad = requires_grad
        # distance to the nearest non-differentiable point, for non-smooth ops
        self.kink_gap: Optional[float] = None
        self._backward: Callable[[], None] = lambda: None

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"Tensor(op={self.op or 'leaf'}, shape={self.value.shape})"

    def backward(self):
        order = topological_order(self)
        for node in order:
            node.grad = np.zeros_like(node.value)
        self.grad = np.ones_like(self.value)
        for node in reversed(order):
            node._backward()

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(as_tensor(other), self)

    def __sub__(self, other):
        return add(self, scale(as_tensor(other), -1.0))

    def __neg__(self):
        return scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return scale(self, float(other))
        return mul(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __matmul__(self, other):
        return matmul(self, other)


def as_tensor(value) -> Tensor:
    if isinstance(value, Tensor):
        return value
    return Tensor(value, requires_grad=False)


def constant(value: ArrayLike) -> Tensor:
    return Tensor(value, requires_grad=False)


def topological_order(root: Tensor) -> List[Tensor]:
    """Parents-before-children ordering of every node reachable from ``root``."""
    order: List[Tensor] = []
    state = {}
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        key = id(node)
        if expanded:
            state[key] = 2
            order.append(node)
            continue
        if state.get(key) == 2:
            continue
        if state.get(key) == 1:
            raise CycleDetectedError(f"computation graph revisits {node!r} while it is open")
        state[key] = 1
        stack.append((node, True))
        for parent in node.parents:
            parent_state = state.get(id(parent))
            if parent_state == 1:
                raise CycleDetectedError(f"computation graph has a cycle through {parent!r}")
            if parent_state is None:
                stack.append((parent, False))
    return order


def kink_distance(root: Tensor) -> float:
    gaps = [node.kink_gap for node in topological_order(root) if node.kink_gap is not None]
    return min(gaps) if gaps else math.inf


def _require_same_shape(a: Tensor, b: Tensor, op: str):
    if a.shape != b.shape:
        raise ShapeMismatchError(f"{op}: shapes {a.shape} and {b.shape} differ")


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _require_same_shape(a, b, "add")
    out = Tensor(a.value + b.value, (a, b), "add")

    def _backward():
        a.grad += out.grad
        b.grad += out.grad
    out._backward = _backward
    return out


def scale(a: Tensor, c: float) -> Tensor:
    out = Tensor(a.value * c, (a,), "scale")

    def _backward():
        a.grad += c * out.grad
    out._backward = _backward
    return out


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _require_same_shape(a, b, "mul")
    out = Tensor(a.value * b.value, (a, b), "mul")

    def _backward():
        a.grad += b.value * out.grad
        b.grad += a.value * out.grad
    out._backward = _backward
    return out


def matmul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.value.ndim not in (1, 2) or b.value.ndim not in (1, 2) or a.value.ndim + b.value.ndim < 3:
        raise ShapeMismatchError(f"matmul: unsupported operand ranks {a.shape} @ {b.shape}")
    if a.shape[-1] != b.shape[0]:
        raise ShapeMismatchError(f"matmul: inner dimensions of {a.shape} @ {b.shape} differ")
    out = Tensor(a.value @ b.value, (a, b), "matmul")

    def _backward():
        g = out.grad
        if a.value.ndim == 2 and b.value.ndim == 2:
            a.grad += g @ b.value.T
            b.grad += a.value.T @ g
        elif a.value.ndim == 2:
            a.grad += np.outer(g, b.value)
            b.grad += a.value.T @ g
        else:
            a.grad += b.value @ g
            b.grad += np.outer(a.value, g)
    out._backward = _backward
    return out


def outer(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.value.ndim != 1 or b.value.ndim != 1:
        raise ShapeMismatchError(f"outer: expects vectors, got {a.shape} and {b.shape}")
    out = Tensor(np.outer(a.value, b.value), (a, b), "outer")

    def _backward():
        a.grad += out.grad @ b.value
        b.grad += out.grad.T @ a.value
    out._backward = _backward
    return out


def soft_threshold(x, tau) -> Tensor:
    """sign(x) * max(|x| - |tau|, 0), odd in x."""
    x = as_tensor(x)
    tau = as_tensor(tau)
    if tau.value.shape != ():
        raise ShapeMismatchError(f"soft_threshold: tau must be a scalar, got {tau.shape}")
    tau_eff = abs(float(tau.value))
    magnitude = np.abs(x.value)
    active = magnitude > tau_eff
    sign = np.sign(x.value)
    out = Tensor(sign * np.maximum(magnitude - tau_eff, 0.0), (x, tau), "soft_threshold")
    gap = float(np.min(np.abs(magnitude - tau_eff))) if x.value.size else math.inf
    out.kink_gap = min(gap, abs(float(tau.value)))

    def _backward():
        g = out.grad * active
        x.grad += g
        tau.grad += -float(np.sum(sign * g)) * float(np.sign(tau.value))
    out._backward = _backward
    return out


def relu(x) -> Tensor:
    x = as_tensor(x)
    active = x.value > 0.0
    out = Tensor(np.where(active, x.value, 0.0), (x,), "relu")
    out.kink_gap = float(np.min(np.abs(x.value))) if x.value.size else math.inf

    def _backward():
        x.grad += out.grad * active
    out._backward = _backward
    return out


def conv1d(x: Tensor, weight: Tensor, bias: Tensor, stride: int = 1) -> Tensor:
    """Valid 1-D cross-correlation of a (C_in, L) input with (C_out, C_in, k) filters."""
    if x.value.ndim != 2 or weight.value.ndim != 3:
        raise ShapeMismatchError(f"conv1d: input {x.shape} / weight {weight.shape} ranks")
    c_out, c_in, width = weight.shape
    if x.shape[0] != c_in or bias.shape != (c_out,):
        raise ShapeMismatchError(
            f"conv1d: input {x.shape}, weight {weight.shape}, bias {bias.shape} do not chain"
        )
    length = x.shape[1]
    if length < width:
        raise ShapeMismatchError(f"conv1d: input length {length} shorter than kernel {width}")
    l_out = (length - width) // stride + 1
    index = np.arange(width)[None, :] + stride * np.arange(l_out)[:, None]
    cols = x.value[:, index].transpose(1, 0, 2).reshape(l_out, c_in * width)
    w2 = weight.value.reshape(c_out, c_in * width)
    out = Tensor(w2 @ cols.T + bias.value[:, None], (x, weight, bias), "conv1d")

    def _backward():
        g = out.grad
        weight.grad += (g @ cols).reshape(weight.shape)
        bias.grad += g.sum(axis=1)
        dcols = (g.T @ w2).reshape(l_out, c_in, width).transpose(1, 0, 2)
        np.add.at(x.grad, (slice(None), index), dcols)
    out._backward = _backward
    return out


def max_pool1d(x: Tensor, width: int) -> Tensor:
    """Non-overlapping max pooling over the length axis; width 0 pools globally."""
    if x.value.ndim != 2:
        raise ShapeMismatchError(f"max_pool1d: expects (C, L), got {x.shape}")
    channels, length = x.shape
    width = length if width == 0 else width
    l_out = length // width if width > 0 else 0
    if l_out == 0:
        raise ShapeMismatchError(f"max_pool1d: window {width} longer than input {length}")
    windows = x.value[:, :l_out * width].reshape(channels, l_out, width)
    arg = windows.argmax(axis=2)
    out = Tensor(np.take_along_axis(windows, arg[..., None], axis=2)[..., 0], (x,), "max_pool1d")
    if width > 1:
        ranked = np.sort(windows, axis=2)
        out.kink_gap = float(np.min(ranked[..., -1] - ranked[..., -2]))

    def _backward():
        routed = np.zeros_like(windows)
        np.put_along_axis(routed, arg[..., None], out.grad[..., None], axis=2)
        x.grad[:, :l_out * width] += routed.reshape(channels, l_out * width)
    out._backward = _backward
    return out


def flatten(x: Tensor) -> Tensor:
    out = Tensor(x.value.reshape(-1), (x,), "flatten")

    def _backward():
        x.grad += out.grad.reshape(x.shape)
    out._backward = _backward
    return out


def affine(weight: Tensor, x: Tensor, bias: Tensor) -> Tensor:
    return add(matmul(weight, x), bias)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


def softmax_cross_entropy(logits: Tensor, label: int) -> Tensor:
    if logits.value.ndim != 1:
        raise ShapeMismatchError(f"softmax_cross_entropy: expects a vector, got {logits.shape}")
    k = logits.shape[0]
    if not 0 <= label < k:
        raise LabelOutOfRangeError(f"label {label} outside [0, {k})")
    z = logits.value - logits.value.max()
    log_norm = math.log(float(np.exp(z).sum()))
    out = Tensor(log_norm - z[label], (logits,), "softmax_cross_entropy")

    def _backward():
        probs = np.exp(z - log_norm)
        probs[label] -= 1.0
        logits.grad += float(out.grad) * probs
    out._backward = _backward
    return out


def masked_mse(pred: Tensor, target: np.ndarray, index: np.ndarray) -> Tensor:
    """Mean squared error of ``pred`` against ``target`` over the entries in ``index``."""
    index = np.asarray(index, dtype=np.int64)
    target = np.asarray(target, dtype=float)
    if target.shape != pred.shape:
        raise ShapeMismatchError(f"masked_mse: target {target.shape} vs prediction {pred.shape}")
    if index.size == 0:
        raise ShapeMismatchError("masked_mse: empty index set")
    diff = pred.value[index] - target[index]
    out = Tensor(float(np.mean(diff ** 2)), (pred,), "masked_mse")

    def _backward():
        np.add.at(pred.grad, index, 2.0 * diff / index.size * float(out.grad))
    out._backward = _backward
    return out


def sum_squares(x: Tensor) -> Tensor:
    out = Tensor(float(np.sum(x.value ** 2)), (x,), "sum_squares")

    def _backward():
        x.grad += 2.0 * x.value * float(out.grad)
    out._backward = _backward
    return out
