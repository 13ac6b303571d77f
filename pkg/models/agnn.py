"""Aggregation GNN classifier.

A flow is turned into a multi-channel sequence by recording, at a few fixed
edges (or nodes), its trajectory under repeated application of the
normalised shift operator:

    G = C [f, (S/l) f, (S/l)^2 f, ..., (S/l)^D f]

A small 1-D CNN (conv, relu, optional max-pool per layer), a flattening
step and an affine layer map G to class logits.

Reorienting an edge that is not selected leaves G unchanged. Reorienting a
selected edge negates its row, which ``rotate_params`` absorbs by negating
the matching input channel of the first convolution.

The linegraph shift sees |f| only, so its sequences do not depend on edge
orientation at all.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from autodiff.optim import AdamOptimizer
from autodiff.tensor import (
    Tensor,
    affine,
    constant,
    conv1d,
    flatten,
    max_pool1d,
    relu,
    softmax,
    softmax_cross_entropy,
)
from config.config_loader import dataclass_from_dict
from graphs.graph import FlipMatrix, Graph
from graphs.hodge import estimate_potentials
from graphs.operators import ShiftOperator
from utils.errors import (
    DimensionMismatchError,
    EmptyDatasetError,
    LabelOutOfRangeError,
    ShapeChainBrokenError,
)
from utils.metrics_calculator import accuracy
from utils.rng import STREAM_INIT, STREAM_SHUFFLE, SeedLike, make_rng

from .base_model import BaseFlowModel

__all__ = [
    "SelectionMatrix",
    "select_top_degree_edges",
    "select_top_degree_nodes",
    "aggregate_sample",
    "aggregate_dataset",
    "ConvSpec",
    "ConvLayer",
    "CnnParams",
    "init_cnn_params",
    "cnn_logits",
    "agnn_forward",
    "agnn_loss",
    "rotate_params",
    "AgnnTrainingConfig",
    "AgnnTrainer",
    "train_classifier",
    "evaluate_accuracy",
    "estimate_potentials",
    "prepare_signal",
    "AggregationGNN",
]

AggSequence = np.ndarray

DEFAULT_CONV = (
    {"channels": 32, "kernel": 8, "stride": 4, "pool": 1},
    {"channels": 64, "kernel": 8, "stride": 4, "pool": 0},
)


@dataclass(frozen=True)
class SelectionMatrix:
    """Rows of C: the ordered, distinct indices being sampled."""

    selected: Tuple[int, ...]

    def __post_init__(self):
        selected = tuple(int(i) for i in self.selected)
        if len(set(selected)) != len(selected):
            raise ValueError(f"selection has repeated indices: {selected}")
        if any(i < 0 for i in selected):
            raise ValueError(f"selection has negative indices: {selected}")
        object.__setattr__(self, "selected", selected)

    def __len__(self) -> int:
        return len(self.selected)

    def signs(self, flip: FlipMatrix) -> np.ndarray:
        """Diagonal of C F C^T."""
        return flip.signs[list(self.selected)]


def select_top_degree_edges(g: Graph, k: int = 5) -> SelectionMatrix:
    """Edges with the largest endpoint degree sum, ties by edge index."""
    degrees = g.degrees()
    score = degrees[g.tails] + degrees[g.heads] if g.num_edges else np.zeros(0, dtype=np.int64)
    ranked = sorted(range(g.num_edges), key=lambda e: (-int(score[e]), e))
    return SelectionMatrix(tuple(ranked[:k]))


def select_top_degree_nodes(g: Graph, k: int = 5) -> SelectionMatrix:
    degrees = g.degrees()
    ranked = sorted(range(g.num_nodes), key=lambda v: (-int(degrees[v]), v))
    return SelectionMatrix(tuple(ranked[:k]))


def aggregate_sample(f: np.ndarray, s: ShiftOperator, c: SelectionMatrix,
                     depth: Optional[int] = None) -> AggSequence:
    """K_sel x (depth + 1) trajectory matrix; ``depth`` defaults to dimension - 1."""
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.shape[0] != s.dimension:
        raise DimensionMismatchError(f"signal of shape {f.shape} for a shift of dimension {s.dimension}")
    if c.selected and max(c.selected) >= s.dimension:
        raise DimensionMismatchError(f"selection {c.selected} outside a shift of dimension {s.dimension}")
    depth = s.dimension - 1 if depth is None else depth
    if depth < 0:
        raise ValueError(f"aggregation depth must be >= 0, got {depth}")

    rows = list(c.selected)
    columns = [f[rows]]
    x = f
    for _ in range(depth):
        x = s.apply(x)
        columns.append(x[rows])
    return np.stack(columns, axis=1)


def aggregate_dataset(signals: Sequence[np.ndarray], s: ShiftOperator, c: SelectionMatrix,
                      depth: Optional[int] = None, workers: int = 1) -> np.ndarray:
    """Stack of aggregated sequences, one per signal."""
    def one(signal):
        return aggregate_sample(signal, s, c, depth)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            sequences = list(executor.map(one, signals))
    else:
        sequences = [one(signal) for signal in signals]
    if not sequences:
        length = (s.dimension - 1 if depth is None else depth) + 1
        return np.zeros((0, len(c), length))
    return np.stack(sequences)


@dataclass(frozen=True)
class ConvSpec:
    channels: int
    kernel: int
    stride: int = 1
    pool: int = 1

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "ConvSpec":
        return dataclass_from_dict(cls, values, "agnn.conv")


def _layer_lengths(in_channels: int, length: int, specs: Sequence[ConvSpec]) -> List[Tuple[int, int]]:
    """(channels, length) after every layer; raises if the chain breaks."""
    shapes = [(in_channels, length)]
    for index, spec in enumerate(specs):
        if spec.channels < 1 or spec.kernel < 1 or spec.stride < 1 or spec.pool < 0:
            raise ShapeChainBrokenError(f"conv layer {index} has an invalid spec {spec}")
        if length < spec.kernel:
            raise ShapeChainBrokenError(
                f"conv layer {index}: input length {length} is shorter than kernel {spec.kernel}"
            )
        length = (length - spec.kernel) // spec.stride + 1
        if spec.pool == 0:
            length = 1
        elif spec.pool > 1:
            if length < spec.pool:
                raise ShapeChainBrokenError(
                    f"conv layer {index}: pool width {spec.pool} exceeds length {length}"
                )
            length //= spec.pool
        shapes.append((spec.channels, length))
    return shapes


@dataclass(frozen=True)
class ConvLayer:
    weight: np.ndarray
    bias: np.ndarray
    stride: int
    pool: int


@dataclass(frozen=True)
class CnnParams:
    layers: Tuple[ConvLayer, ...]
    fc_weight: np.ndarray
    fc_bias: np.ndarray
    input_shape: Tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "input_shape", tuple(int(d) for d in self.input_shape))
        channels, length = self.input_shape
        for index, layer in enumerate(self.layers):
            c_out, c_in, _ = layer.weight.shape
            if c_in != channels or layer.bias.shape != (c_out,):
                raise ShapeChainBrokenError(
                    f"conv layer {index}: weight {layer.weight.shape} / bias {layer.bias.shape} "
                    f"do not follow {channels} channels"
                )
            channels = c_out
        shapes = _layer_lengths(self.input_shape[0], self.input_shape[1], self.specs())
        flat = shapes[-1][0] * shapes[-1][1]
        if self.fc_weight.ndim != 2 or self.fc_weight.shape[1] != flat or self.fc_bias.shape != (self.fc_weight.shape[0],):
            raise ShapeChainBrokenError(
                f"affine layer {self.fc_weight.shape} / {self.fc_bias.shape} does not accept {flat} features"
            )

    @property
    def num_classes(self) -> int:
        return self.fc_weight.shape[0]

    def specs(self) -> List[ConvSpec]:
        return [
            ConvSpec(layer.weight.shape[0], layer.weight.shape[2], layer.stride, layer.pool)
            for layer in self.layers
        ]

    def arrays(self) -> Dict[str, np.ndarray]:
        out = {}
        for index, layer in enumerate(self.layers):
            out[f"conv{index}.weight"] = layer.weight
            out[f"conv{index}.bias"] = layer.bias
        out["fc.weight"] = self.fc_weight
        out["fc.bias"] = self.fc_bias
        return out

    def with_arrays(self, arrays: Dict[str, np.ndarray]) -> "CnnParams":
        layers = tuple(
            ConvLayer(np.array(arrays[f"conv{i}.weight"], dtype=float),
                      np.array(arrays[f"conv{i}.bias"], dtype=float), layer.stride, layer.pool)
            for i, layer in enumerate(self.layers)
        )
        return CnnParams(layers, np.array(arrays["fc.weight"], dtype=float),
                         np.array(arrays["fc.bias"], dtype=float), self.input_shape)

    def meta(self) -> Dict[str, Any]:
        return {
            "input_shape": list(self.input_shape),
            "conv": [{"stride": layer.stride, "pool": layer.pool} for layer in self.layers],
        }

    @classmethod
    def from_arrays(cls, arrays: Dict[str, np.ndarray], meta: Dict[str, Any]) -> "CnnParams":
        layers = tuple(
            ConvLayer(np.array(arrays[f"conv{i}.weight"], dtype=float),
                      np.array(arrays[f"conv{i}.bias"], dtype=float), int(spec["stride"]), int(spec["pool"]))
            for i, spec in enumerate(meta["conv"])
        )
        return cls(layers, np.array(arrays["fc.weight"], dtype=float),
                   np.array(arrays["fc.bias"], dtype=float), tuple(meta["input_shape"]))


def _as_specs(conv: Sequence[Any]) -> List[ConvSpec]:
    return [spec if isinstance(spec, ConvSpec) else ConvSpec.from_dict(spec) for spec in conv]


def init_cnn_params(input_shape: Tuple[int, int], num_classes: int, conv: Sequence[Any] = DEFAULT_CONV,
                    seed: SeedLike = 0, std: float = 0.1) -> CnnParams:
    """Gaussian weights with standard deviation ``std``, zero biases."""
    if num_classes < 1:
        raise ValueError(f"need at least one class, got {num_classes}")
    specs = _as_specs(conv)
    shapes = _layer_lengths(input_shape[0], input_shape[1], specs)
    rng = make_rng(seed)
    layers = []
    for spec, (c_in, _) in zip(specs, shapes):
        layers.append(ConvLayer(
            weight=rng.normal(0.0, std, (spec.channels, c_in, spec.kernel)),
            bias=np.zeros(spec.channels),
            stride=spec.stride,
            pool=spec.pool,
        ))
    flat = shapes[-1][0] * shapes[-1][1]
    return CnnParams(tuple(layers), rng.normal(0.0, std, (num_classes, flat)),
                     np.zeros(num_classes), input_shape)


def cnn_logits(g_seq: AggSequence, leaves: Dict[str, Tensor], p: CnnParams) -> Tensor:
    g_seq = np.asarray(g_seq, dtype=float)
    if g_seq.shape != p.input_shape:
        raise ShapeChainBrokenError(f"sequence of shape {g_seq.shape}, network expects {p.input_shape}")
    h = constant(g_seq)
    for index, layer in enumerate(p.layers):
        h = relu(conv1d(h, leaves[f"conv{index}.weight"], leaves[f"conv{index}.bias"], layer.stride))
        if layer.pool != 1:
            h = max_pool1d(h, layer.pool)
    return affine(leaves["fc.weight"], flatten(h), leaves["fc.bias"])


def _leaves(p: CnnParams) -> Dict[str, Tensor]:
    return {name: Tensor(value) for name, value in p.arrays().items()}


def agnn_forward(g_seq: AggSequence, p: CnnParams) -> np.ndarray:
    """Class probabilities."""
    return softmax(cnn_logits(g_seq, _leaves(p), p).value)


def agnn_loss(g_seq: AggSequence, label: int, leaves: Dict[str, Tensor], p: CnnParams) -> Tensor:
    return softmax_cross_entropy(cnn_logits(g_seq, leaves, p), int(label))


def rotate_params(p: CnnParams, flip: FlipMatrix, c: SelectionMatrix) -> CnnParams:
    """Parameters for reoriented inputs: input channel i of the first layer scaled by [C F C^T]_ii."""
    if not p.layers:
        raise ShapeChainBrokenError("rotation needs at least one convolution layer")
    signs = c.signs(flip)
    first = p.layers[0]
    rotated = ConvLayer(first.weight * signs[None, :, None], first.bias, first.stride, first.pool)
    return CnnParams((rotated,) + p.layers[1:], p.fc_weight, p.fc_bias, p.input_shape)


def predict_labels(p: CnnParams, sequences: np.ndarray) -> np.ndarray:
    return np.array([int(np.argmax(agnn_forward(seq, p))) for seq in sequences], dtype=np.int64)


def evaluate_accuracy(p: CnnParams, sequences: np.ndarray, labels: Sequence[int]) -> float:
    return accuracy(labels, predict_labels(p, sequences))


@dataclass(frozen=True)
class AgnnTrainingConfig:
    k_sel: int = 5
    agg_depth: int = 63
    conv: Tuple[Dict[str, int], ...] = field(default_factory=lambda: tuple(dict(c) for c in DEFAULT_CONV))
    epochs: int = 30
    lr: float = 1e-3
    batch_size: int = 16
    seed: int = 0
    shift: str = "hodge"
    init_std: float = 0.1

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "AgnnTrainingConfig":
        return dataclass_from_dict(cls, values, "agnn")


def _check_labels(labels: np.ndarray, num_classes: int):
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise LabelOutOfRangeError(f"labels must lie in [0, {num_classes}), got {labels.min()}..{labels.max()}")


def prepare_signal(f: np.ndarray, g: Graph, kind: str) -> np.ndarray:
    """Signal fed to the aggregation.

    The node shift works on estimated potentials. The linegraph shift has no
    notion of orientation and sees |f| only.
    """
    if kind == "node":
        return estimate_potentials(f, g)
    f = np.asarray(f, dtype=float)
    return np.abs(f) if kind == "linegraph" else f


def _dataset_sequences(data, s: ShiftOperator, c: SelectionMatrix, depth: int) -> Tuple[np.ndarray, np.ndarray]:
    if any(r.label is None for r in data.records):
        raise LabelOutOfRangeError("every training record needs a class label")
    signals = [prepare_signal(r.flow, data.graph, s.kind) for r in data.records]
    return aggregate_dataset(signals, s, c, depth), data.labels()


class AgnnTrainer:
    """Minibatch Adam on softmax cross-entropy with per-epoch test accuracy."""

    def __init__(self, cfg: AgnnTrainingConfig = None, seed: Optional[int] = None, verbose: bool = False):
        self.cfg = cfg or AgnnTrainingConfig()
        self.seed = self.cfg.seed if seed is None else seed
        self.verbose = verbose
        self.history: List[Dict[str, float]] = []

    def fit_sequences(self, sequences: np.ndarray, labels: Sequence[int], num_classes: int,
                      test_sequences: Optional[np.ndarray] = None,
                      test_labels: Optional[Sequence[int]] = None) -> CnnParams:
        sequences = np.asarray(sequences, dtype=float)
        labels = np.asarray(labels, dtype=np.int64)
        if sequences.shape[0] == 0:
            raise EmptyDatasetError("no training sequences supplied")
        if labels.shape[0] != sequences.shape[0]:
            raise DimensionMismatchError(f"{sequences.shape[0]} sequences but {labels.shape[0]} labels")
        _check_labels(labels, num_classes)
        cfg = self.cfg
        if cfg.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {cfg.batch_size}")

        params = init_cnn_params(sequences.shape[1:], num_classes, cfg.conv,
                                 make_rng(self.seed, STREAM_INIT), std=cfg.init_std)
        optimizer = AdamOptimizer(lr=cfg.lr)
        shuffle_rng = make_rng(self.seed, STREAM_SHUFFLE)
        self.history = []

        for epoch in range(cfg.epochs):
            order = shuffle_rng.permutation(sequences.shape[0])
            batch_losses = []
            for start in range(0, order.shape[0], cfg.batch_size):
                batch = order[start:start + cfg.batch_size]
                total = {name: np.zeros_like(value) for name, value in params.arrays().items()}
                loss_sum = 0.0
                for index in batch:
                    leaves = _leaves(params)
                    loss = agnn_loss(sequences[index], labels[index], leaves, params)
                    loss.backward()
                    loss_sum += float(loss.value)
                    for name, leaf in leaves.items():
                        total[name] += leaf.grad
                grads = {name: g / len(batch) for name, g in total.items()}
                params = params.with_arrays(optimizer.step(params.arrays(), grads))
                batch_losses.append(loss_sum / len(batch))

            test_acc = float("nan")
            if test_sequences is not None and len(test_sequences):
                test_acc = evaluate_accuracy(params, test_sequences, test_labels)
            self.history.append({
                "epoch": epoch + 1,
                "train_loss": float(np.mean(batch_losses)),
                "test_accuracy": test_acc,
            })
            if self.verbose:
                print(f"    🔁 epoch {epoch + 1}/{cfg.epochs}: loss {self.history[-1]['train_loss']:.4f}, "
                      f"test accuracy {test_acc:.3f}")
        return params

    def fit_dataset(self, data, s: ShiftOperator, c: SelectionMatrix, test_data=None) -> CnnParams:
        if len(data.records) == 0:
            raise EmptyDatasetError("no training records supplied")
        depth = min(self.cfg.agg_depth, s.dimension - 1)
        sequences, labels = _dataset_sequences(data, s, c, depth)
        num_classes = data.num_classes or int(labels.max()) + 1
        test_sequences = test_labels = None
        if test_data is not None and len(test_data.records):
            test_sequences, test_labels = _dataset_sequences(test_data, s, c, depth)
        return self.fit_sequences(sequences, labels, num_classes, test_sequences, test_labels)


def train_classifier(data, s: ShiftOperator, c: SelectionMatrix, cfg: AgnnTrainingConfig = None,
                     seed: Optional[int] = None, test_data=None) -> CnnParams:
    """Train on a labelled Dataset; ``test_data`` feeds the per-epoch accuracy curve."""
    return AgnnTrainer(cfg, seed).fit_dataset(data, s, c, test_data)


class AggregationGNN(BaseFlowModel):
    """Source-community classifier bound to one graph and shift kind."""

    def __init__(self, graph: Graph, cfg: AgnnTrainingConfig = None):
        self.cfg = cfg or AgnnTrainingConfig()
        super().__init__(
            name=f"{self.cfg.shift}-agnn",
            description=f"Aggregation GNN on the {self.cfg.shift} shift operator",
        )
        self.graph = graph
        self.shift = ShiftOperator.build(graph, self.cfg.shift)
        if self.cfg.shift == "node":
            self.selection = select_top_degree_nodes(graph, self.cfg.k_sel)
        else:
            self.selection = select_top_degree_edges(graph, self.cfg.k_sel)
        self.depth = min(self.cfg.agg_depth, self.shift.dimension - 1)
        self.params: Optional[CnnParams] = None
        self.trainer: Optional[AgnnTrainer] = None

    def sequences(self, flows: Sequence[np.ndarray]) -> np.ndarray:
        signals = [prepare_signal(f, self.graph, self.cfg.shift) for f in flows]
        return aggregate_dataset(signals, self.shift, self.selection, self.depth)

    def fit(self, train, test=None, seed: Optional[int] = None, verbose: bool = False) -> CnnParams:
        self.trainer = AgnnTrainer(self.cfg, seed, verbose)
        self.params = self.trainer.fit_dataset(train, self.shift, self.selection, test)
        return self.params

    @property
    def history(self) -> List[Dict[str, float]]:
        return self.trainer.history if self.trainer else []

    def predict(self, flows: Sequence[np.ndarray]) -> np.ndarray:
        if self.params is None:
            raise RuntimeError(f"{self.name} has no parameters; call fit() or load() first")
        return predict_labels(self.params, self.sequences(flows))

    def parameter_arrays(self) -> Dict[str, np.ndarray]:
        return self.params.arrays()

    def checkpoint_meta(self) -> Dict[str, Any]:
        return dict(self.params.meta(), shift=self.cfg.shift, selection=list(self.selection.selected))

    def load_arrays(self, arrays: Dict[str, np.ndarray], meta: Dict[str, Any]) -> None:
        self.params = CnnParams.from_arrays(arrays, meta)
