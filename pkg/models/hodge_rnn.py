"""Recurrent flow interpolator.

With x_0 the masked flow and H_0 = 0, each of the K steps computes

    x_k = (S / lambda_max) x_{k-1}
    H_k = sigma(x_k u^T + H_{k-1} V)

and the output is o_K = sigma(H_K w), where sigma is soft-thresholding with
a trainable threshold (one for the hidden state, one for the output).
Because sigma is odd, reorienting edges (f -> F f, L1 -> F L1 F) flips the
output the same way. The linegraph variant sees |f| and is orientation-free.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from autodiff.optim import AdamOptimizer
from autodiff.tensor import Tensor, constant, masked_mse, matmul, outer, relu, soft_threshold
from config.config_loader import dataclass_from_dict
from datagen.masks import MaskSet, restrict, sample_artificial
from graphs.operators import ShiftOperator
from utils.errors import (
    DimensionMismatchError,
    EmptyDatasetError,
    EmptyMaskError,
    UnsupportedShiftError,
)
from utils.rng import STREAM_INIT, STREAM_MASKS, STREAM_SHUFFLE, STREAM_VALIDATION, SeedLike, make_rng

from .base_model import BaseFlowModel

RNN_SHIFTS = ("hodge", "linegraph")
ACTIVATIONS = ("soft_threshold", "relu")


@dataclass(frozen=True)
class RnnParams:
    u: np.ndarray
    V: np.ndarray
    w: np.ndarray
    tau_hidden: float
    tau_out: float
    k_steps: int

    def __post_init__(self):
        if self.f_dim < 1 or self.k_steps < 1:
            raise ValueError(f"need f_dim >= 1 and k_steps >= 1, got {self.f_dim} and {self.k_steps}")
        if self.V.shape != (self.f_dim, self.f_dim) or self.w.shape != (self.f_dim,):
            raise DimensionMismatchError(
                f"u {self.u.shape}, V {self.V.shape}, w {self.w.shape} do not share a feature size"
            )
        values = np.concatenate([self.u, self.V.ravel(), self.w, [self.tau_hidden, self.tau_out]])
        if not np.all(np.isfinite(values)):
            raise ValueError("RNN parameters must be finite")

    @property
    def f_dim(self) -> int:
        return self.u.shape[0]

    def arrays(self) -> Dict[str, np.ndarray]:
        return {
            "u": self.u,
            "V": self.V,
            "w": self.w,
            "tau_hidden": np.array(self.tau_hidden),
            "tau_out": np.array(self.tau_out),
        }

    @classmethod
    def from_arrays(cls, arrays: Dict[str, np.ndarray], k_steps: int) -> "RnnParams":
        return cls(
            u=np.array(arrays["u"], dtype=float),
            V=np.array(arrays["V"], dtype=float),
            w=np.array(arrays["w"], dtype=float),
            tau_hidden=float(arrays["tau_hidden"]),
            tau_out=float(arrays["tau_out"]),
            k_steps=int(k_steps),
        )

    @classmethod
    def zeros(cls, f_dim: int, k_steps: int) -> "RnnParams":
        return cls(np.zeros(f_dim), np.zeros((f_dim, f_dim)), np.zeros(f_dim), 0.0, 0.0, k_steps)


def init_rnn_params(f_dim: int = 16, k_steps: int = 8, seed: SeedLike = 0,
                    std: float = 0.1, tau_init: float = 0.01) -> RnnParams:
    rng = make_rng(seed)
    return RnnParams(
        u=rng.normal(0.0, std, f_dim),
        V=rng.normal(0.0, std, (f_dim, f_dim)),
        w=rng.normal(0.0, std, f_dim),
        tau_hidden=tau_init,
        tau_out=tau_init,
        k_steps=k_steps,
    )


@dataclass(frozen=True)
class RnnTrainingConfig:
    f_dim: int = 16
    k_steps: int = 8
    epochs: int = 20
    lr: float = 1e-3
    mask_fraction: float = 0.1
    seed: int = 0
    shift: str = "hodge"
    init_std: float = 0.1
    tau_init: float = 0.01

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "RnnTrainingConfig":
        return dataclass_from_dict(cls, values, "hodge_rnn")


def _check_shift(s: ShiftOperator):
    if s.kind not in RNN_SHIFTS:
        raise UnsupportedShiftError(f"the RNN needs a {RNN_SHIFTS} shift, got '{s.kind}'")


def _model_view(f: np.ndarray, s: ShiftOperator) -> np.ndarray:
    """What the model sees of a flow: |f| for the orientation-free linegraph shift."""
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.shape[0] != s.dimension:
        raise DimensionMismatchError(f"flow of shape {f.shape} for a shift of dimension {s.dimension}")
    return np.abs(f) if s.kind == "linegraph" else f


def _forward_graph(x0: np.ndarray, s: ShiftOperator, leaves: Dict[str, Tensor], k_steps: int,
                   activation: str = "soft_threshold") -> Tensor:
    if activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation '{activation}', expected one of {ACTIVATIONS}")

    def sigma(pre: Tensor, tau: Tensor) -> Tensor:
        return soft_threshold(pre, tau) if activation == "soft_threshold" else relu(pre)

    x = x0
    hidden: Optional[Tensor] = None
    for _ in range(k_steps):
        x = s.apply(x)
        pre = outer(constant(x), leaves["u"])
        if hidden is not None:
            pre = pre + matmul(hidden, leaves["V"])
        hidden = sigma(pre, leaves["tau_hidden"])
    return sigma(matmul(hidden, leaves["w"]), leaves["tau_out"])


def _leaves(p: RnnParams) -> Dict[str, Tensor]:
    return {name: Tensor(value) for name, value in p.arrays().items()}


def rnn_forward(f_in: np.ndarray, s: ShiftOperator, p: RnnParams,
                activation: str = "soft_threshold") -> np.ndarray:
    """o_K for an input whose unobserved entries are already zero."""
    _check_shift(s)
    x0 = _model_view(f_in, s)
    return _forward_graph(x0, s, _leaves(p), p.k_steps, activation).value.copy()


def _loss_graph(f_true: np.ndarray, s: ShiftOperator, m: MaskSet, leaves: Dict[str, Tensor],
                k_steps: int) -> Tensor:
    if not m.artificial:
        raise EmptyMaskError("the artificial mask is empty; nothing to supervise")
    target = _model_view(f_true, s)
    x0 = restrict(target, m.visible())
    output = _forward_graph(x0, s, leaves, k_steps)
    return masked_mse(output, target, np.array(m.artificial, dtype=np.int64))


def rnn_loss(f_true: np.ndarray, p: RnnParams, s: ShiftOperator, m: MaskSet) -> float:
    _check_shift(s)
    return float(_loss_graph(f_true, s, m, _leaves(p), p.k_steps).value)


def rnn_loss_and_grads(f_true: np.ndarray, p: RnnParams, s: ShiftOperator,
                       m: MaskSet) -> Tuple[float, Dict[str, np.ndarray]]:
    _check_shift(s)
    leaves = _leaves(p)
    loss = _loss_graph(f_true, s, m, leaves, p.k_steps)
    loss.backward()
    return float(loss.value), {name: leaf.grad.copy() for name, leaf in leaves.items()}


def interpolate(f_obs: np.ndarray, observed: Union[MaskSet, Sequence[int]], s: ShiftOperator,
                p: RnnParams) -> np.ndarray:
    """Model output on unobserved edges, f_obs passed through on observed ones."""
    _check_shift(s)
    f_obs = np.asarray(f_obs, dtype=float)
    mask = observed if isinstance(observed, MaskSet) else MaskSet(tuple(observed))
    visible = np.array(mask.observed, dtype=np.int64)
    prediction = rnn_forward(restrict(f_obs, visible), s, p)
    prediction[visible] = f_obs[visible]
    return prediction


TrainingRecord = Tuple[np.ndarray, MaskSet]


def _as_records(data) -> List[TrainingRecord]:
    # Dataset objects expose .records with .flow / .mask
    if hasattr(data, "records"):
        return [
            (np.asarray(r.flow, dtype=float), r.mask or MaskSet.all_observed(len(r.flow)))
            for r in data.records
        ]
    if isinstance(data, np.ndarray) and data.ndim == 1:
        return [(data.astype(float), MaskSet.all_observed(data.shape[0]))]
    records = []
    for item in data:
        if isinstance(item, tuple):
            flow, mask = item
            records.append((np.asarray(flow, dtype=float), mask))
        else:
            flow = np.asarray(item, dtype=float)
            records.append((flow, MaskSet.all_observed(flow.shape[0])))
    return records


class RnnTrainer:
    """Adam on the masked reconstruction loss, one flow per step.

    Psi is redrawn every step from a dedicated stream; the visiting order,
    the fixed validation masks and the initial parameters use their own
    streams, so two identical flows behave exactly like one flow visited twice.
    """

    def __init__(self, s: ShiftOperator, cfg: RnnTrainingConfig = None, seed: Optional[int] = None,
                 verbose: bool = False):
        _check_shift(s)
        self.shift = s
        self.cfg = cfg or RnnTrainingConfig()
        self.seed = self.cfg.seed if seed is None else seed
        self.verbose = verbose
        self.step_losses: List[float] = []
        self.validation_history: List[float] = []
        self.last_params: Optional[RnnParams] = None

    def _validation_loss(self, records: List[TrainingRecord], masks: List[MaskSet], p: RnnParams) -> float:
        losses = [rnn_loss(flow, p, self.shift, m) for (flow, _), m in zip(records, masks) if m.artificial]
        return float(np.mean(losses)) if losses else float("inf")

    def fit(self, data) -> RnnParams:
        records = _as_records(data)
        if not records:
            raise EmptyDatasetError("no training flows supplied")
        cfg = self.cfg

        params = init_rnn_params(cfg.f_dim, cfg.k_steps, make_rng(self.seed, STREAM_INIT),
                                 std=cfg.init_std, tau_init=cfg.tau_init)
        optimizer = AdamOptimizer(lr=cfg.lr)
        mask_rng = make_rng(self.seed, STREAM_MASKS)
        shuffle_rng = make_rng(self.seed, STREAM_SHUFFLE)
        validation_rng = make_rng(self.seed, STREAM_VALIDATION)
        validation_masks = [sample_artificial(mask, cfg.mask_fraction, validation_rng) for _, mask in records]

        best_loss = self._validation_loss(records, validation_masks, params)
        best_params = params
        self.validation_history = [best_loss]
        self.step_losses = []

        for epoch in range(cfg.epochs):
            for index in shuffle_rng.permutation(len(records)):
                flow, mask = records[index]
                step_mask = sample_artificial(mask, cfg.mask_fraction, mask_rng)
                if not step_mask.artificial:
                    continue
                loss, grads = rnn_loss_and_grads(flow, params, self.shift, step_mask)
                params = RnnParams.from_arrays(optimizer.step(params.arrays(), grads), cfg.k_steps)
                self.step_losses.append(loss)

            val_loss = self._validation_loss(records, validation_masks, params)
            self.validation_history.append(val_loss)
            if val_loss < best_loss:
                best_loss, best_params = val_loss, params
            if self.verbose:
                print(f"    🔁 epoch {epoch + 1}/{cfg.epochs}: validation loss {val_loss:.6g}")

        self.last_params = params
        return best_params


def train_interpolator(data, s: ShiftOperator, cfg: RnnTrainingConfig = None,
                       seed: Optional[int] = None) -> RnnParams:
    return RnnTrainer(s, cfg, seed).fit(data)


class HodgeRNN(BaseFlowModel):
    """Trainable interpolator bound to one shift operator."""

    def __init__(self, shift: ShiftOperator, cfg: RnnTrainingConfig = None):
        _check_shift(shift)
        super().__init__(
            name=f"{shift.kind}-rnn",
            description=f"Recurrent flow interpolator on the {shift.kind} shift operator",
        )
        self.shift = shift
        self.cfg = cfg or RnnTrainingConfig(shift=shift.kind)
        self.params = init_rnn_params(self.cfg.f_dim, self.cfg.k_steps,
                                      make_rng(self.cfg.seed, STREAM_INIT),
                                      std=self.cfg.init_std, tau_init=self.cfg.tau_init)
        self.trainer: Optional[RnnTrainer] = None

    @property
    def unsigned(self) -> bool:
        return self.shift.kind == "linegraph"

    def fit(self, data, seed: Optional[int] = None) -> RnnParams:
        self.trainer = RnnTrainer(self.shift, self.cfg, seed)
        self.params = self.trainer.fit(data)
        return self.params

    def predict(self, f_obs: np.ndarray, observed: Union[MaskSet, Sequence[int]]) -> np.ndarray:
        return interpolate(f_obs, observed, self.shift, self.params)

    def parameter_arrays(self) -> Dict[str, np.ndarray]:
        return self.params.arrays()

    def checkpoint_meta(self) -> Dict[str, Any]:
        return {"k_steps": self.params.k_steps, "shift": self.shift.kind}

    def load_arrays(self, arrays: Dict[str, np.ndarray], meta: Dict[str, Any]) -> None:
        self.params = RnnParams.from_arrays(arrays, meta.get("k_steps", self.cfg.k_steps))
